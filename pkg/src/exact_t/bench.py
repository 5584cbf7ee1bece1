"""Fixed, seeded benchmark networks and the cut-budget sweep."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence

from .library import Library
from .mapper import MapConfig, map_network, naive_t
from .xag import XagNetwork, random_network

BENCH_SEED = 2024


def random_sop_network(rng: random.Random, n_pis: int, n_terms: int, n_pos: int = 1) -> XagNetwork:
    """Outputs are XORs of ANDs of small linear forms; these leave room for cut sharing."""
    net = XagNetwork()
    pis = [net.add_pi(f"x{i}") for i in range(n_pis)]

    def linear() -> int:
        k = rng.choice((1, 1, 2))
        acc = 0
        for p in rng.sample(pis, k):
            acc = p if acc == 0 else net.add_xor(acc, p)
        return acc ^ rng.randrange(2)

    for j in range(n_pos):
        acc = None
        for _ in range(n_terms):
            term = net.add_and(linear(), linear())
            acc = term if acc is None else net.add_xor(acc, term)
        net.add_output(acc, f"y{j}")
    return net


def small_networks(count: int = 50, seed: int = BENCH_SEED, max_pis: int = 5,
                   max_gates: int = 6, max_qubits: int = 11) -> List[XagNetwork]:
    """Networks small enough to verify by simulation; half random, half sum-of-products."""
    rng = random.Random(seed)
    out: List[XagNetwork] = []
    while len(out) < count:
        n_pis = rng.randint(2, max_pis)
        if len(out) % 2:
            net = random_sop_network(rng, n_pis, rng.randint(1, 3), 1)
        else:
            net = random_network(rng, n_pis, rng.randint(1, max_gates), rng.randint(1, 2), rng.uniform(0.3, 0.7))
        gates = len(net.reachable())
        if gates == 0 or gates > max_gates or net.num_pis + gates + net.num_pos > max_qubits + 1:
            continue
        out.append(net)
    return out


def sweep_networks(count: int = 24, seed: int = BENCH_SEED + 1) -> List[XagNetwork]:
    rng = random.Random(seed)
    out: List[XagNetwork] = []
    while len(out) < count:
        if len(out) % 2:
            net = random_sop_network(rng, 6, rng.randint(2, 4), rng.randint(1, 2))
        else:
            net = random_network(rng, 6, rng.randint(8, 20), rng.randint(1, 3), rng.uniform(0.3, 0.5))
        if net.num_ands() and net.reachable():
            out.append(net)
    return out


def geomean(values: Sequence[float]) -> float:
    """Geometric mean with a +1 shift so zero-T networks do not collapse it."""
    if not values:
        return 0.0
    return math.exp(sum(math.log(v + 1.0) for v in values) / len(values)) - 1.0


@dataclass
class SweepRow:
    cuts: int
    geomean_t: float
    total_t: int
    naive_total_t: int
    exact: bool


def budget_sweep(nets: Sequence[XagNetwork], budgets: Sequence[int], lib: Library,
                 base: Optional[MapConfig] = None) -> List[SweepRow]:
    base = base or MapConfig()
    naive = [naive_t(n) for n in nets]
    rows = []
    for c in budgets:
        cfg = replace(base, cuts_per_node=c)
        ts, exact = [], True
        for n in nets:
            cover = map_network(n, cfg, lib).cover
            ts.append(cover.total_t)
            exact = exact and cover.exact
        rows.append(SweepRow(c, geomean(ts), sum(ts), sum(naive), exact))
    return rows


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    lines = ["cuts,geomean_t,total_t,naive_total_t,exact"]
    for r in rows:
        lines.append(f"{r.cuts},{r.geomean_t:.4f},{r.total_t},{r.naive_total_t},{int(r.exact)}")
    return "\n".join(lines) + "\n"


def ratio_summary(mapped: Sequence[int], naive: Sequence[int]) -> Dict[str, float]:
    ratios = [(m + 1.0) / (n + 1.0) for m, n in zip(mapped, naive)]
    return {"geomean_ratio": math.exp(sum(map(math.log, ratios)) / len(ratios)) if ratios else 1.0,
            "improved": float(sum(m < n for m, n in zip(mapped, naive)))}
