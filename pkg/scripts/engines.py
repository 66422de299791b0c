"""Time the two exact search engines against each other as the candidate count grows.

    python scripts/engines.py --instances 40 --max-enumerate 14

Both engines must return the same fill; the script exits 1 if they ever differ.
"""

from __future__ import annotations

import argparse
import sys
import time
from collections import defaultdict
from dataclasses import dataclass

from treecompat.compatibility import random_profile
from treecompat.display_graph import build_display_graph
from treecompat.legal import search_with_stats


@dataclass
class EngineConfig:
    instances: int = 40
    max_enumerate: int = 14
    universe: int = 7
    seed: int = 0


def fill_of(outcome):
    return None if outcome.triangulation is None else outcome.triangulation.sorted_fill()


def main(argv: list[str] | None = None) -> int:
    defaults = EngineConfig()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=defaults.instances)
    ap.add_argument("--max-enumerate", type=int, default=defaults.max_enumerate,
                    help="skip subset enumeration above this many candidates")
    ap.add_argument("--universe", type=int, default=defaults.universe)
    ap.add_argument("--seed", type=int, default=defaults.seed)
    cfg = EngineConfig(**{k.replace("-", "_"): v for k, v in vars(ap.parse_args(argv)).items()})

    timings: dict[int, list[tuple[float, float | None]]] = defaultdict(list)
    mismatches = 0
    for i in range(cfg.instances):
        k, n = [(2, 4), (2, 5), (2, 6), (3, 4), (3, 5), (3, 6)][i % 6]
        g = build_display_graph(random_profile(cfg.seed + i, k, n, 0.6, cfg.universe))
        m = len(g.candidate_fill_edges())
        t0 = time.perf_counter()
        elim = search_with_stats(g, limit=None, method="elimination")
        t1 = time.perf_counter()
        enum_s = None
        if m <= cfg.max_enumerate:
            enum = search_with_stats(g, limit=None, method="enumerate")
            enum_s = time.perf_counter() - t1
            mismatches += fill_of(enum) != fill_of(elim)
        timings[m].append((t1 - t0, enum_s))

    print(f"{'candidates':>10} {'count':>5} {'elimination_s':>14} {'enumerate_s':>12}")
    for m in sorted(timings):
        rows = timings[m]
        elim = sum(r[0] for r in rows) / len(rows)
        enums = [r[1] for r in rows if r[1] is not None]
        enum = f"{sum(enums) / len(enums):12.4f}" if enums else f"{'-':>12}"
        print(f"{m:>10} {len(rows):>5} {elim:14.4f} {enum}")
    print(f"engine mismatches: {mismatches}")
    return 0 if mismatches == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
