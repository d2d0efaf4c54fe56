#!/usr/bin/env python3
"""Timing smoke for the two complexity claims worth watching.

Experiment 1: the plain bottom-up fold over balanced static trees, doubling
node counts; the column should grow linearly.

Experiment 2: the shared-structure diagram fold on ladder DAGs
AND(OR(b1,b2), OR(b2,b3), ...) where every inner action is shared by two
gates, against the exponential subset oracle while it still fits.

    python3 scripts/bench_scaling.py [--max-power 17] [--oracle-cutoff 14]
"""

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from atquant import bas_of, bu_bdd, bu_sat, build, builtin, oracle_metric_static
from atquant.analysis import bu_bdd_detailed
from atquant.tree import NodeType


@dataclass(frozen=True)
class BenchConfig:
    max_power: int = 17  # balanced trees up to 2^max_power - 1 nodes
    oracle_cutoff: int = 14  # largest BAS count the subset oracle attempts
    ladder_max: int = 60


def balanced_tree(leaf_power: int):
    defs = [(f"b{i}", NodeType.BAS, []) for i in range(2 ** leaf_power)]
    layer = [d[0] for d in defs]
    gi = 0
    depth = 0
    while len(layer) > 1:
        gate = NodeType.AND if depth % 2 == 0 else NodeType.OR
        nxt = []
        for j in range(0, len(layer), 2):
            lbl = f"g{gi}"
            gi += 1
            defs.append((lbl, gate, [layer[j], layer[j + 1]]))
            nxt.append(lbl)
        layer = nxt
        depth += 1
    return build(defs, layer[0])


def ladder_dag(rungs: int):
    """AND of rungs ORs over a chain of shared basic actions."""
    defs = [(f"b{i}", NodeType.BAS, []) for i in range(rungs + 1)]
    for i in range(rungs):
        defs.append((f"o{i}", NodeType.OR, [f"b{i}", f"b{i + 1}"]))
    defs.append(("root", NodeType.AND, [f"o{i}" for i in range(rungs)]))
    return build(defs, "root")


def clock(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def bench_fold(cfg: BenchConfig) -> None:
    print("balanced static trees, min-cost fold")
    print(f"{'nodes':>9} {'fold ms':>9}")
    dom = builtin("min-cost")
    power = 10
    while power <= cfg.max_power:
        t = balanced_tree(power - 1)  # 2^power - 1 nodes total
        a = {b: 1 for b in bas_of(t)}
        _, dt = clock(bu_sat, t, a, dom)
        print(f"{len(t):>9} {dt * 1000:>9.1f}")
        power += 1
    print()


def bench_ladder(cfg: BenchConfig) -> None:
    print("ladder DAGs, min-cost: diagram fold vs subset oracle")
    print(f"{'BAS':>5} {'bdd nodes':>10} {'bdd ms':>8} {'oracle ms':>10} {'agree':>6}")
    dom = builtin("min-cost")
    rungs = 4
    while rungs <= cfg.ladder_max:
        t = ladder_dag(rungs)
        n = len(bas_of(t))
        a = {b: 1 + (b % 3) for b in bas_of(t)}
        run, dt_bdd = clock(bu_bdd_detailed, t, a, dom)
        if n <= cfg.oracle_cutoff:
            want, dt_oracle = clock(oracle_metric_static, t, a, dom)
            agree = "yes" if want == run.value else "NO"
            oracle_col = f"{dt_oracle * 1000:>10.1f}"
        else:
            agree = "-"
            oracle_col = f"{'skipped':>10}"
        print(f"{n:>5} {run.diagram.node_count():>10} {dt_bdd * 1000:>8.1f} "
              f"{oracle_col} {agree:>6}")
        rungs *= 2
    print()


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-power", type=int, default=17)
    ap.add_argument("--oracle-cutoff", type=int, default=14)
    ap.add_argument("--ladder-max", type=int, default=60)
    ns = ap.parse_args()
    cfg = BenchConfig(ns.max_power, ns.oracle_cutoff, ns.ladder_max)
    bench_fold(cfg)
    bench_ladder(cfg)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
