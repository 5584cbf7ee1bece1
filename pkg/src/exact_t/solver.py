"""Minimum-T phase-polynomial synthesis.

Given a target phase ``p`` over ``N`` wires, find the fewest parities ``s``
such that ``Phi @ s = p`` over GF(2).  Every feasible ``s`` lies in the coset
``s0 + ker(Phi)``; clean output ancillas add further shifts (Clifford gates
applied to an output after it holds its value, see :func:`derive_dont_cares`).
The coset is searched exhaustively when its dimension allows it, otherwise by
a seeded descent that is still exhaustive over an inner subspace.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from random import Random
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import gf2
from .gf2 import BitVec
from .phasepoly import (
    NonRealizablePhase,
    PhaseVecF2,
    ZetaPoly,
    build_phi,
    mask_to_wires,
    monomial_index,
    parity_phase_z8,
    popcount,
    reduce_f2,
    xor_lift,
)
from .quadratic import QuadraticSpec

_MASK64 = (1 << 64) - 1
_TABLE_BITS = 20


class SolverError(RuntimeError):
    """Raised when a solver invariant breaks (an internal bug, not bad input)."""


@dataclass(frozen=True)
class SolverConfig:
    exact_nullity_limit: int = 26
    heuristic_inner_dim: int = 22
    heuristic_budget: int = 256  # inner-coset evaluations per heuristic solve
    restarts: int = 3
    seed: int = 0
    time_limit: Optional[float] = None
    use_dont_cares: bool = False
    max_wires: int = 7
    workers: int = 1

    def __post_init__(self):
        for name in ("exact_nullity_limit", "heuristic_inner_dim", "heuristic_budget", "max_wires", "workers"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.restarts < 0:
            raise ValueError("restarts must be non-negative")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")


@dataclass(frozen=True)
class FreeGenerator:
    """A Clifford applied to output ``output`` once it holds ``f_output(x)``.

    ``z8_image`` is the phase one application adds, written over the input
    variables.  Kinds: ``S``, ``Z``, ``CZx`` (with input ``other``) and
    ``CZy`` (with output ``other``).
    """

    kind: str
    output: int
    other: int
    z8_image: ZetaPoly
    f2_image: PhaseVecF2

    @property
    def ident(self) -> str:
        if self.kind in ("S", "Z"):
            return f"{self.kind}{self.output}"
        return f"CZ{self.output}{'x' if self.kind == 'CZx' else 'y'}{self.other}"

    @property
    def high_part(self) -> ZetaPoly:
        return self.z8_image.high_degree_part()

    def wires(self, n_inputs: int) -> Tuple[int, ...]:
        return generator_wires(self.ident, n_inputs)[1]

    def powers(self) -> Tuple[int, ...]:
        return (1, 3) if self.kind == "S" else (1,)


def parse_generator_id(ident: str) -> Tuple[str, int, int]:
    """``"S0"`` -> ("S", 0, -1); ``"CZ1x3"`` -> ("CZx", 1, 3); ``"CZ0y1"`` -> ("CZy", 0, 1)."""
    try:
        if ident[0] in "SZ":
            return ident[0], int(ident[1:]), -1
        if ident.startswith("CZ"):
            body = ident[2:]
            sep = "x" if "x" in body else "y"
            j, other = body.split(sep)
            return "CZ" + sep, int(j), int(other)
    except (IndexError, ValueError):
        pass
    raise ValueError(f"bad generator id {ident!r}")


def generator_wires(ident: str, n_inputs: int) -> Tuple[str, Tuple[int, ...]]:
    """Gate kind and wires of a generator, in instance wire numbering."""
    kind, j, other = parse_generator_id(ident)
    out = n_inputs + j
    if kind in ("S", "Z"):
        return kind, (out,)
    if kind == "CZx":
        return kind, (out, other)
    return kind, (out, n_inputs + other)


@dataclass(frozen=True)
class SynthesisInstance:
    n_inputs: int
    n_outputs: int
    target_z8: ZetaPoly
    target_f2: PhaseVecF2
    free_gens: Tuple[FreeGenerator, ...] = ()
    spec: Optional[QuadraticSpec] = None
    config: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.target_f2.index.n != self.n_wires:
            raise ValueError("target vector does not match wire count")
        if reduce_f2(self.target_z8, self.target_f2.index) != self.target_f2:
            raise ValueError("target_f2 is not the reduction of target_z8")

    @property
    def n_wires(self) -> int:
        return self.n_inputs + self.n_outputs

    @classmethod
    def from_target(cls, n_wires: int, target_z8: ZetaPoly,
                    config: Optional[SolverConfig] = None) -> "SynthesisInstance":
        """A bare phase-block instance: every wire is an input, no ancillas."""
        cfg = config or SolverConfig(max_wires=max(n_wires, 1))
        idx = monomial_index(n_wires)
        return cls(n_wires, 0, target_z8, reduce_f2(target_z8, idx), (), None, cfg)

    def generator(self, ident: str) -> FreeGenerator:
        for g in self.free_gens:
            if g.ident == ident:
                return g
        raise KeyError(f"no free generator {ident!r}")


@dataclass(frozen=True)
class Solution:
    n_wires: int
    selection: BitVec  # bit k-1 selects the parity with mask k
    parity_coeffs: Tuple[Tuple[int, int], ...]  # (parity mask, odd coefficient mod 8)
    chosen_free_gens: Tuple[Tuple[str, int], ...] = ()  # (generator id, gate power)
    clifford_completion: Tuple[Tuple[str, int, int], ...] = ()  # ("S", wire, power) | ("CZ", a, b)
    exact: bool = True

    @property
    def t_count(self) -> int:
        return self.selection.popcount()

    @property
    def parities(self) -> List[int]:
        return [i + 1 for i in self.selection.indices()]

    def coeff_map(self) -> Dict[int, int]:
        return dict(self.parity_coeffs)


# -- instance construction ---------------------------------------------------

def build_instance(spec: QuadraticSpec, config: Optional[SolverConfig] = None) -> SynthesisInstance:
    """Phase target ``sum_j 4 * Q_j(x) * z_j`` where ``z_j`` is output wire ``n + j``.

    Linear terms and constants only contribute Clifford phases and stay out
    of the target.
    """
    cfg = config or SolverConfig()
    n_wires = spec.n_wires
    if n_wires > cfg.max_wires:
        raise ValueError(f"{n_wires} wires exceeds the configured limit of {cfg.max_wires}")
    if n_wires == 0:
        raise ValueError("empty spec")
    target = {}
    for j, out in enumerate(spec.outputs):
        z = 1 << (spec.n + j)
        for a, b in out.quadratic:
            target[(1 << a) | (1 << b) | z] = 4
    tz = ZetaPoly(target)
    idx = monomial_index(n_wires)
    return SynthesisInstance(spec.n, spec.m, tz, reduce_f2(tz, idx), tuple(derive_dont_cares(spec)), spec, cfg)


def derive_dont_cares(spec: QuadraticSpec) -> List[FreeGenerator]:
    idx = monomial_index(spec.n_wires)
    lifts = [xor_lift(out.monomials()) for out in spec.outputs]
    gens = []

    def make(kind, j, other, image):
        gens.append(FreeGenerator(kind, j, other, image, reduce_f2(image, idx, strict=False)))

    for j, f in enumerate(lifts):
        make("S", j, -1, f.scale(2))
        make("Z", j, -1, f.scale(4))
        for i in range(spec.n):
            make("CZx", j, i, f.scale(4) * ZetaPoly.var(i))
        for l in range(j + 1, spec.m):
            make("CZy", j, l, f.scale(4) * lifts[l])
    return gens


# -- coset search ------------------------------------------------------------

def _nwords(width: int) -> int:
    return max(1, (width + 63) // 64)


class _SpanTable:
    """All XOR combinations of up to ~2^22 vectors, one uint64 column per word."""

    def __init__(self, vectors: Sequence[int], nwords: int):
        self.nwords = nwords
        self.wtype = np.uint8 if nwords <= 3 else np.uint16
        cols = []
        for wi in range(nwords):
            col = np.zeros(1 << len(vectors), dtype=np.uint64)
            for i, v in enumerate(vectors):
                col[1 << i: 2 << i] = col[: 1 << i] ^ np.uint64((v >> (64 * wi)) & _MASK64)
            cols.append(col)
        self.cols = cols

    def best(self, offset: int) -> Tuple[int, int]:
        """(min weight, smallest value at that weight) over ``offset + span``."""
        offs = [np.uint64((offset >> (64 * wi)) & _MASK64) for wi in range(self.nwords)]
        w = np.bitwise_count(self.cols[0] ^ offs[0])
        if self.nwords > 1:
            w = w.astype(self.wtype)
            for col, off in zip(self.cols[1:], offs[1:]):
                w += np.bitwise_count(col ^ off)
        mn = int(w.min())
        idx = np.flatnonzero(w == mn)
        # integer order: compare the highest word first
        for col, off in zip(reversed(self.cols), reversed(offs)):
            vals = col[idx] ^ off
            idx = idx[vals == vals.min()]
        value = 0
        for wi, (col, off) in enumerate(zip(self.cols, offs)):
            value |= int(col[idx[0]] ^ off) << (64 * wi)
        return mn, value


def _gray_offset(index: int, vectors: Sequence[int]) -> int:
    g = index ^ (index >> 1)
    off = 0
    i = 0
    while g:
        if g & 1:
            off ^= vectors[i]
        g >>= 1
        i += 1
    return off


def _scan(table: _SpanTable, start: int, outer: Sequence[int], lo: int, hi: int) -> Tuple[int, int]:
    off = start ^ _gray_offset(lo, outer)
    best = table.best(off)
    for t in range(lo + 1, hi):
        off ^= outer[(t & -t).bit_length() - 1]
        r = table.best(off)
        if r < best:
            best = r
    return best


def min_weight_in_coset(start: int, basis: Sequence[int], width: int, workers: int = 1) -> Tuple[int, int]:
    """Exhaustive (weight, value)-minimum of ``start + span(basis)``.

    The outer Gray-code range is cut into contiguous chunks, each scanned
    independently; the final min over chunk results does not depend on how
    many workers ran them.
    """
    nwords = _nwords(width)
    inner, outer = list(basis[:_TABLE_BITS]), list(basis[_TABLE_BITS:])
    table = _SpanTable(inner, nwords)
    total = 1 << len(outer)
    if workers <= 1 or total < 2:
        return _scan(table, start, outer, 0, total)
    nchunks = min(total, workers * 4)
    bounds = [(total * c // nchunks, total * (c + 1) // nchunks) for c in range(nchunks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda b: _scan(table, start, outer, b[0], b[1]), bounds))
    return min(results)


def _descend(start: int, inner: Sequence[int], outer: Sequence[int], width: int,
             cfg: SolverConfig) -> Tuple[int, int]:
    """Greedy single-vector descent over ``outer`` with seeded restarts.

    Every evaluation is exhaustive over ``span(inner)``, so the first descent
    (starting from the zero outer combination) never does worse than the
    exact optimum of the inner coset.
    """
    table = _SpanTable(inner, _nwords(width))
    rng = Random(cfg.seed)
    deadline = None if cfg.time_limit is None else time.monotonic() + cfg.time_limit
    budget = cfg.heuristic_budget
    cache: Dict[int, Tuple[int, int]] = {}

    def evaluate(state: int) -> Tuple[int, int]:
        nonlocal budget
        if state not in cache:
            off = start
            for i, v in enumerate(outer):
                if (state >> i) & 1:
                    off ^= v
            cache[state] = table.best(off)
            budget -= 1
        return cache[state]

    def exhausted() -> bool:
        return budget <= 0 or (deadline is not None and time.monotonic() > deadline)

    best = evaluate(0)
    for restart in range(cfg.restarts + 1):
        if exhausted():
            break
        state = 0 if restart == 0 else rng.getrandbits(len(outer))
        cur = evaluate(state)
        improved = True
        while improved and not exhausted():
            improved = False
            order = list(range(len(outer)))
            rng.shuffle(order)
            for i in order:
                if exhausted():
                    break
                cand = state ^ (1 << i)
                r = evaluate(cand)
                if r < cur:
                    state, cur, improved = cand, r, True
        best = min(best, cur)
    return best


# -- solving -----------------------------------------------------------------

@lru_cache(maxsize=None)
def _kernel(n_wires: int) -> Tuple[int, ...]:
    phi = build_phi(n_wires, limit=max(n_wires, 1))
    return tuple(v.bits for v in gf2.null_space_basis(phi))


def _phi(n_wires: int):
    return build_phi(n_wires, limit=max(n_wires, 1))


def _usable_combinations(gens: Sequence[FreeGenerator]) -> List[int]:
    """Basis of generator subsets whose summed degree>=4 phase vanishes mod 8.

    Single generators can carry terms like 4*x1*x2*x3*x4 that no phase block
    can cancel; only subsets where those terms pair up are realizable.
    """
    high_monos: Dict[int, int] = {}
    columns = []
    for g in gens:
        col = 0
        for m, v in g.high_part.items():
            if v % 4:
                raise SolverError(f"generator {g.ident} has degree>=4 coefficient {v}")
            if (v // 4) & 1:
                col |= 1 << high_monos.setdefault(m, len(high_monos))
        columns.append(col)
    sig = gf2.BitMatrix.from_columns(len(high_monos), columns)
    return [v.bits for v in gf2.null_space_basis(sig)]


def _search_basis(inst: SynthesisInstance, cfg: SolverConfig) -> Tuple[List[Tuple[int, int]], int]:
    """Independent (shift, generator-subset) pairs spanning the solution coset."""
    K = (1 << inst.n_wires) - 1
    phi = _phi(inst.n_wires)
    candidates = [(v, 0) for v in _kernel(inst.n_wires)]
    if cfg.use_dont_cares and inst.free_gens:
        gens = [g for g in inst.free_gens if g.f2_image or g.high_part]
        for combo in _usable_combinations(gens):
            image = None
            subset = 0
            for gi, g in enumerate(gens):
                if (combo >> gi) & 1:
                    image = g.f2_image if image is None else image ^ g.f2_image
                    subset |= 1 << inst.free_gens.index(g)
            if image is None or not image:
                continue
            shift = gf2.solve(phi, image.bits)
            if shift is None:
                raise SolverError("generator image outside the column space of Phi")
            candidates.append((shift.bits, subset))
    # keep an independent set on the shift part, remembering generator subsets
    reduced: Dict[int, Tuple[int, int]] = {}
    basis: List[Tuple[int, int]] = []
    for shift, subset in candidates:
        while shift:
            top = shift.bit_length() - 1
            if top not in reduced:
                reduced[top] = (shift, subset)
                basis.append((shift, subset))
                break
            bs, bt = reduced[top]
            shift ^= bs
            subset ^= bt
    return basis, K


def _decompose(delta: int, basis: Sequence[Tuple[int, int]]) -> int:
    """Generator subset of the combination of ``basis`` whose shift is ``delta``.

    Basis shifts have distinct top bits, so descending elimination is unique.
    """
    by_top = {s.bit_length() - 1: (s, t) for s, t in basis}
    subset = 0
    for top in sorted(by_top, reverse=True):
        if (delta >> top) & 1:
            s, t = by_top[top]
            delta ^= s
            subset ^= t
    if delta:
        raise SolverError("selection is not in the searched coset")
    return subset


def solve(inst: SynthesisInstance, config: Optional[SolverConfig] = None) -> Solution:
    cfg = config or inst.config
    N = inst.n_wires
    if N > cfg.max_wires:
        raise ValueError(f"{N} wires exceeds the configured limit of {cfg.max_wires}")
    phi = _phi(N)
    s0 = gf2.solve(phi, inst.target_f2.bits)
    if s0 is None:
        raise SolverError("target phase is outside the column space of Phi")
    basis, K = _search_basis(inst, cfg)
    shifts = [s for s, _ in basis]
    if len(shifts) <= cfg.exact_nullity_limit:
        _, best = min_weight_in_coset(s0.bits, shifts, K, cfg.workers)
        exact = True
    else:
        inner_dim = min(cfg.heuristic_inner_dim, len(shifts))
        _, best = _descend(s0.bits, shifts[:inner_dim], shifts[inner_dim:], K, cfg)
        exact = False
    subset = _decompose(best ^ s0.bits, basis)
    chosen = [g for i, g in enumerate(inst.free_gens) if (subset >> i) & 1]
    selection = BitVec(K, best)
    coeffs, powers = _choose_powers(inst, selection, chosen)
    partial = Solution(
        N, selection, tuple(sorted(coeffs.items())),
        tuple((g.ident, powers[g.ident]) for g in chosen), (), exact,
    )
    return replace(partial, clifford_completion=tuple(clifford_completion(inst, partial)))


# -- Clifford completion -----------------------------------------------------

def _low(z: ZetaPoly) -> Dict[int, int]:
    return {m: v for m, v in z.items() if 1 <= popcount(m) <= 2}


def _completion_cost(residual: Dict[int, int]) -> int:
    return sum(1 for v in residual.values() if v % 8)


def _word_cost(c: int) -> int:
    return 0 if c in (1, 7) else 1


def _choose_powers(inst: SynthesisInstance, selection: BitVec,
                   chosen: Sequence[FreeGenerator]) -> Tuple[Dict[int, int], Dict[str, int]]:
    """Pick each T power (1, 3, 5, 7) and each S power (1, 3) greedily.

    Only oddness is fixed by the GF(2) system; the choice moves degree-1 and
    degree-2 residuals, i.e. the number of completion S/Z/CZ gates.
    """
    parities = [i + 1 for i in selection.indices()]
    coeffs = {k: 1 for k in parities}
    powers = {g.ident: 1 for g in chosen}
    resid: Dict[int, int] = dict(_low(inst.target_z8))

    def add(z: ZetaPoly, k: int):
        for m, v in _low(z).items():
            resid[m] = (resid.get(m, 0) + k * v) % 8

    for k in parities:
        add(parity_phase_z8(k), -1)
    for g in chosen:
        add(g.z8_image, -1)

    def total() -> int:
        return _completion_cost(resid) + sum(_word_cost(c) for c in coeffs.values())

    current = total()
    for _ in range(4):
        changed = False
        for k in parities:
            lift = parity_phase_z8(k)
            for c in (1, 7, 3, 5):
                if c == coeffs[k]:
                    continue
                add(lift, coeffs[k] - c)
                old, coeffs[k] = coeffs[k], c
                cost = total()
                if cost < current:
                    current, changed = cost, True
                    break
                add(lift, c - old)
                coeffs[k] = old
        for g in chosen:
            for e in g.powers():
                if e == powers[g.ident]:
                    continue
                add(g.z8_image, powers[g.ident] - e)
                old, powers[g.ident] = powers[g.ident], e
                cost = total()
                if cost < current:
                    current, changed = cost, True
                    break
                add(g.z8_image, e - old)
                powers[g.ident] = old
        if not changed:
            break
    return coeffs, powers


class CompletionError(SolverError):
    pass


def residual_phase(inst: SynthesisInstance, sol: Solution) -> ZetaPoly:
    r = inst.target_z8
    for k, c in sol.parity_coeffs:
        r = r - parity_phase_z8(k).scale(c)
    for ident, e in sol.chosen_free_gens:
        r = r - inst.generator(ident).z8_image.scale(e)
    return r


def clifford_completion(inst: SynthesisInstance, sol: Solution) -> List[Tuple[str, int, int]]:
    """S/Z/CZ gates realizing the residual phase left after the T gadgets."""
    coeffs = sol.coeff_map()
    if set(coeffs) != set(sol.parities):
        raise CompletionError("parity coefficients do not match the selection")
    for k, c in coeffs.items():
        if c % 2 == 0:
            raise CompletionError(f"parity {k} has even coefficient {c}")
    ops: List[Tuple[str, int, int]] = []
    for m, v in residual_phase(inst, sol).items():
        d = popcount(m)
        ws = mask_to_wires(m)
        if d == 0:
            continue  # global phase
        if d == 1:
            if v % 2:
                raise CompletionError(f"odd degree-1 residual {v} on wire {ws[0]}")
            ops.append(("S", ws[0], v // 2))
        elif d == 2:
            if v != 4:
                raise CompletionError(f"degree-2 residual {v} on {ws} is not 0 mod 4")
            ops.append(("CZ", ws[0], ws[1]))
        else:
            raise CompletionError(f"degree-{d} residual {v} on {ws}")
    return ops


def check_solution(inst: SynthesisInstance, sol: Solution) -> None:
    """Re-multiply ``Phi @ s`` and replay the Z_8 completion; raise on mismatch."""
    phi = _phi(inst.n_wires)
    lhs = phi.matvec(sol.selection)
    for ident, _ in sol.chosen_free_gens:
        lhs = lhs ^ inst.generator(ident).f2_image.bits
    if lhs != inst.target_f2.bits:
        raise SolverError("selection violates the GF(2) phase constraint")
    if sorted(clifford_completion(inst, sol)) != sorted(sol.clifford_completion):
        raise CompletionError("stored completion does not match the residual")


__all__ = [
    "CompletionError", "FreeGenerator", "NonRealizablePhase", "Solution", "SolverConfig",
    "SolverError", "SynthesisInstance", "build_instance", "check_solution", "clifford_completion",
    "derive_dont_cares", "generator_wires", "min_weight_in_coset", "parse_generator_id", "residual_phase", "solve",
]
