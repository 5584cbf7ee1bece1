"""Cut enumeration over degree-<=2 functions and T-priced area-flow covering.

A cut ANF is a frozenset of monomials; each monomial is a sorted tuple of
leaf node ids and ``()`` is the constant 1.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .library import Library, lookup
from .quadratic import OutputAnf, QuadraticSpec
from .solver import Solution, SolverConfig
from .xag import AND, Anf, XagNetwork, lit_compl, lit_node

Term = Tuple[int, ...]
CutAnf = FrozenSet[Term]

ONE: CutAnf = frozenset({()})


def anf_degree(anf: CutAnf) -> int:
    return max((len(t) for t in anf), default=0)


def anf_support(anf: CutAnf) -> Tuple[int, ...]:
    return tuple(sorted({v for t in anf for v in t}))


def anf_xor(a: CutAnf, b: CutAnf) -> CutAnf:
    return a ^ b


def anf_and(a: CutAnf, b: CutAnf) -> CutAnf:
    out: set = set()
    for s in a:
        for t in b:
            out ^= {tuple(sorted(set(s) | set(t)))}
    return frozenset(out)


@dataclass(frozen=True)
class Cut:
    root: int
    leaves: Tuple[int, ...]
    anf: CutAnf
    t_cost: int = 0
    exact: bool = True

    @property
    def degree(self) -> int:
        return anf_degree(self.anf)

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    @property
    def is_trivial(self) -> bool:
        return self.leaves == (self.root,)

    @property
    def quadratic_terms(self) -> List[Term]:
        return sorted(t for t in self.anf if len(t) == 2)

    @property
    def linear_terms(self) -> List[int]:
        return sorted(t[0] for t in self.anf if len(t) == 1)

    @property
    def const(self) -> int:
        return int(() in self.anf)

    def as_anf(self) -> Anf:
        pos = {v: i for i, v in enumerate(self.leaves)}
        masks = []
        for t in self.anf:
            m = 0
            for v in t:
                m |= 1 << pos[v]
            masks.append(m)
        return Anf(self.leaves, frozenset(masks))

    def rank_key(self):
        return (self.t_cost, len(self.leaves), self.leaves)

    def describe(self) -> str:
        return str(self.as_anf())


def trivial_cut(node: int) -> Cut:
    return Cut(node, (node,), frozenset({(node,)}))


def cut_spec(cut: Cut, with_linear: bool = False) -> Tuple[QuadraticSpec, Tuple[int, ...]]:
    """Single-output spec priced for ``cut`` and the leaf behind each spec input.

    Without don't-cares only the quadratic part matters, so inputs are the
    leaves that occur in a degree-2 term.  With don't-cares the generators
    depend on the whole output value, so every leaf in the ANF is kept.
    """
    if with_linear:
        inputs = anf_support(cut.anf)
    else:
        inputs = anf_support(frozenset(cut.quadratic_terms))
    pos = {v: i for i, v in enumerate(inputs)}
    quad = [(pos[a], pos[b]) for a, b in cut.quadratic_terms]
    lin = [pos[v] for v in cut.linear_terms if v in pos]
    return QuadraticSpec(len(inputs), (OutputAnf.make(quad, lin, cut.const),)), inputs


@dataclass
class MapConfig:
    max_leaves: int = 6
    cuts_per_node: int = 8
    area_flow_passes: int = 3
    library_path: Optional[str] = None
    solve_budget: Optional[int] = None  # heuristic evaluations per on-demand solve
    recovery_passes: int = 2

    def __post_init__(self):
        if self.max_leaves < 2:
            raise ValueError("max_leaves must be at least 2")
        if self.cuts_per_node < 1:
            raise ValueError("cuts_per_node must be at least 1")
        if self.area_flow_passes < 1:
            raise ValueError("area_flow_passes must be at least 1")
        if self.recovery_passes < 0:
            raise ValueError("recovery_passes must be non-negative")


@dataclass
class StageTimes:
    cut_enumeration: float = 0.0
    library_lookup: float = 0.0
    on_demand_solve: float = 0.0
    area_flow: float = 0.0

    def as_dict(self) -> Dict[str, float]:
        return {
            "cut_enumeration": self.cut_enumeration,
            "library_lookup": self.library_lookup,
            "on_demand_solve": self.on_demand_solve,
            "area_flow": self.area_flow,
        }


class CutPricer:
    """Prices cuts through a library, solving and inserting on a miss."""

    def __init__(self, lib: Library, times: Optional[StageTimes] = None):
        self.lib = lib
        self.times = times or StageTimes()
        self.hits = 0
        self.misses = 0

    @property
    def with_linear(self) -> bool:
        return self.lib.with_linear

    def price(self, cut: Cut) -> Tuple[int, bool]:
        spec, _ = cut_spec(cut, self.with_linear)
        if spec.is_linear():
            return 0, True
        if spec.n_wires > self.lib.n_max:
            raise ValueError(f"cut needs {spec.n_wires} wires, library holds at most {self.lib.n_max}")
        t0 = time.perf_counter()
        found = lookup(self.lib, spec)
        self.times.library_lookup += time.perf_counter() - t0
        if found is not None:
            self.hits += 1
            return found[0].t_count, found[0].exact
        self.misses += 1
        t0 = time.perf_counter()
        entry = self.lib.solve_and_insert(spec)
        self.times.on_demand_solve += time.perf_counter() - t0
        return entry.t_count, entry.exact

    def solution(self, cut: Cut) -> Tuple[Optional[Solution], QuadraticSpec, Tuple[int, ...]]:
        """Solution in cut-spec wire order, the spec, and its input leaves."""
        spec, inputs = cut_spec(cut, self.with_linear)
        if spec.is_linear():
            return None, spec, inputs
        found = lookup(self.lib, spec)
        if found is None:
            self.price(cut)
            found = lookup(self.lib, spec)
        entry, in_perm, out_perm = found
        return entry.solution_for(in_perm, out_perm), spec, inputs


def cut_cost(cut: Cut, lib: Library) -> int:
    return CutPricer(lib).price(cut)[0]


def _signed(cut: Cut, compl: int) -> CutAnf:
    return cut.anf ^ ONE if compl else cut.anf


def enumerate_cuts(net: XagNetwork, cfg: MapConfig, pricer: CutPricer,
                   nodes: Optional[Iterable[int]] = None) -> Dict[int, List[Cut]]:
    """Per-node cut lists, trivial cut first, the rest ranked and truncated."""
    t0 = time.perf_counter()
    base = (pricer.times.library_lookup, pricer.times.on_demand_solve)
    wanted = set(nodes) if nodes is not None else set(net.reachable())
    cuts: Dict[int, List[Cut]] = {v: [trivial_cut(v)] for v in net.pi_nodes}
    for v in net.gates():
        if v not in wanted:
            continue
        node = net.nodes[v]
        la, lb = node.fanins
        a, b = lit_node(la), lit_node(lb)
        cands: Dict[Tuple[int, ...], CutAnf] = {}
        for ca in cuts[a]:
            fa = _signed(ca, lit_compl(la))
            for cb in cuts[b]:
                if len(set(ca.leaves) | set(cb.leaves)) > cfg.max_leaves:
                    continue
                fb = _signed(cb, lit_compl(lb))
                if node.kind == AND:
                    if anf_degree(fa) > 1 or anf_degree(fb) > 1:
                        continue
                    f = anf_and(fa, fb)
                else:
                    f = anf_xor(fa, fb)
                if anf_degree(f) > 2:
                    continue
                # leaves that cancelled out are dropped; the root is a function of the rest
                leaves = anf_support(f)
                if leaves == (v,):
                    continue
                cands.setdefault(leaves, f)
        priced = []
        for leaves, f in cands.items():
            c = Cut(v, leaves, f)
            t, exact = pricer.price(c)
            priced.append(Cut(v, leaves, f, t, exact))
        priced.sort(key=Cut.rank_key)
        cuts[v] = [trivial_cut(v)] + priced[: cfg.cuts_per_node]
    priced = (pricer.times.library_lookup - base[0]) + (pricer.times.on_demand_solve - base[1])
    pricer.times.cut_enumeration += time.perf_counter() - t0 - priced
    return cuts


@dataclass
class Cover:
    cuts: Dict[int, Cut] = field(default_factory=dict)
    flows: Dict[int, float] = field(default_factory=dict)

    @property
    def total_t(self) -> int:
        return sum(c.t_cost for c in self.cuts.values())

    @property
    def exact(self) -> bool:
        return all(c.exact for c in self.cuts.values())

    @property
    def nodes(self) -> List[int]:
        return sorted(self.cuts)

    def check(self, net: XagNetwork) -> None:
        """Every PO driver and every chosen leaf is a PI, a constant or covered."""
        def ok(v: int) -> bool:
            return not net.is_gate(v) or v in self.cuts
        for _, lit_ in net.outputs:
            if not ok(lit_node(lit_)):
                raise ValueError(f"output node {lit_node(lit_)} is not covered")
        for v, c in self.cuts.items():
            for leaf in c.leaves:
                if not ok(leaf):
                    raise ValueError(f"leaf {leaf} of cut at {v} is not covered")


def _extract(net: XagNetwork, best: Dict[int, Cut]) -> Dict[int, Cut]:
    chosen: Dict[int, Cut] = {}
    stack = [lit_node(l) for _, l in net.outputs]
    while stack:
        v = stack.pop()
        if v in chosen or not net.is_gate(v):
            continue
        chosen[v] = best[v]
        stack.extend(l for l in best[v].leaves if net.is_gate(l))
    return chosen


class _Refs:
    """Reference counts of a cover implied by ``best``; ref/deref return the T they add or free."""

    def __init__(self, net: XagNetwork, best: Dict[int, Cut]):
        self.net = net
        self.best = best
        self.count: Dict[int, int] = {}
        for _, l in net.outputs:
            v = lit_node(l)
            if net.is_gate(v):
                self.count[v] = self.count.get(v, 0) + 1
                if self.count[v] == 1:
                    self.ref(best[v])

    def ref(self, cut: Cut) -> int:
        area, stack = 0, [cut]
        while stack:
            c = stack.pop()
            area += c.t_cost
            for l in c.leaves:
                if self.net.is_gate(l):
                    self.count[l] = self.count.get(l, 0) + 1
                    if self.count[l] == 1:
                        stack.append(self.best[l])
        return area

    def deref(self, cut: Cut) -> int:
        area, stack = 0, [cut]
        while stack:
            c = stack.pop()
            area += c.t_cost
            for l in c.leaves:
                if self.net.is_gate(l):
                    self.count[l] -= 1
                    if self.count[l] == 0:
                        stack.append(self.best[l])
        return area


def _area_flow(gates: List[int], cuts: Dict[int, List[Cut]], refs: Dict[int, float]):
    flow: Dict[int, float] = {}
    best: Dict[int, Cut] = {}
    for v in gates:
        scored = []
        for c in cuts[v]:
            if c.is_trivial:
                continue
            af = c.t_cost + sum(flow.get(l, 0.0) / max(refs.get(l, 1.0), 1.0) for l in c.leaves)
            scored.append((af, len(c.leaves), c.leaves, c))
        scored.sort(key=lambda s: s[:3])
        flow[v] = scored[0][0]
        best[v] = scored[0][3]
    return flow, best


def _recover(net: XagNetwork, gates: List[int], cuts: Dict[int, List[Cut]], best: Dict[int, Cut]) -> None:
    """One exact-area pass: re-pick each used node's cut by the T it really adds."""
    refs = _Refs(net, best)
    for v in gates:
        if refs.count.get(v, 0) == 0:
            continue
        refs.deref(best[v])
        scored = []
        for c in cuts[v]:
            if c.is_trivial:
                continue
            area = refs.ref(c)
            refs.deref(c)
            scored.append((area, len(c.leaves), c.leaves, c))
        scored.sort(key=lambda s: s[:3])
        best[v] = scored[0][3]
        refs.ref(best[v])


def select_cover(net: XagNetwork, cuts: Dict[int, List[Cut]], cfg: MapConfig,
                 times: Optional[StageTimes] = None) -> Cover:
    """Area-flow passes, then exact-area recovery passes, then extraction from the outputs.

    Area flow after the first pass divides by the reference counts of the
    previous cover instead of structural fanout.
    """
    t0 = time.perf_counter()
    refs: Dict[int, float] = {v: float(max(f, 1)) for v, f in enumerate(net.fanout_counts())}
    gates = [v for v in net.gates() if v in cuts]
    flow: Dict[int, float] = {}
    best: Dict[int, Cut] = {}
    for _ in range(cfg.area_flow_passes):
        flow, best = _area_flow(gates, cuts, refs)
        counts: Dict[int, int] = {}
        for c in _extract(net, best).values():
            for l in c.leaves:
                counts[l] = counts.get(l, 0) + 1
        for _, l in net.outputs:
            counts[lit_node(l)] = counts.get(lit_node(l), 0) + 1
        refs = {v: float(max(counts.get(v, 0), 1)) for v in refs}
    for _ in range(cfg.recovery_passes):
        _recover(net, gates, cuts, best)
    chosen = _extract(net, best)
    if times is not None:
        times.area_flow += time.perf_counter() - t0
    return Cover({v: chosen[v] for v in sorted(chosen)}, {v: flow[v] for v in sorted(chosen)})


def direct_cut(net: XagNetwork, v: int, pricer: Optional[CutPricer] = None) -> Cut:
    """The cut whose leaves are the node's own fanins."""
    la, lb = net.nodes[v].fanins
    fa = _signed(trivial_cut(lit_node(la)), lit_compl(la))
    fb = _signed(trivial_cut(lit_node(lb)), lit_compl(lb))
    f = anf_and(fa, fb) if net.kind(v) == AND else anf_xor(fa, fb)
    c = Cut(v, anf_support(f), f)
    if pricer is None:
        return Cut(v, c.leaves, f, 7 if c.degree == 2 else 0)
    t, exact = pricer.price(c)
    return Cut(v, c.leaves, f, t, exact)


def naive_cover(net: XagNetwork, pricer: Optional[CutPricer] = None) -> Cover:
    """Every reachable gate implemented on its own; ANDs cost 7 unless a pricer says otherwise."""
    best = {v: direct_cut(net, v, pricer) for v in net.reachable()}
    chosen = _extract(net, best)
    return Cover({v: chosen[v] for v in sorted(chosen)})


def naive_t(net: XagNetwork) -> int:
    return 7 * sum(1 for v in net.reachable() if net.kind(v) == AND)


@dataclass
class MapResult:
    cover: Cover
    cuts: Dict[int, List[Cut]]
    times: StageTimes
    hits: int = 0
    misses: int = 0
    fallback: bool = False  # the per-gate cover was cheaper and was kept


def default_library(cfg: MapConfig, solver: Optional[SolverConfig] = None) -> Library:
    scfg = solver or SolverConfig(max_wires=cfg.max_leaves + 1)
    if cfg.solve_budget is not None:
        scfg = SolverConfig(**{**scfg.__dict__, "heuristic_budget": cfg.solve_budget})
    return Library(max(scfg.max_wires, cfg.max_leaves + 1), scfg)


def map_network(net: XagNetwork, cfg: Optional[MapConfig] = None, lib: Optional[Library] = None) -> MapResult:
    cfg = cfg or MapConfig()
    if lib is None:
        lib = default_library(cfg)
    if lib.n_max < cfg.max_leaves + 1:
        raise ValueError(f"library covers {lib.n_max} wires but cuts may need {cfg.max_leaves + 1}")
    times = StageTimes()
    pricer = CutPricer(lib, times)
    cuts = enumerate_cuts(net, cfg, pricer)
    cover = select_cover(net, cuts, cfg, times)
    # the per-gate cover is always legal; keep it when the heuristics did worse
    plain = naive_cover(net, pricer)
    fallback = plain.total_t < cover.total_t
    if fallback:
        cover = plain
    cover.check(net)
    return MapResult(cover, cuts, times, pricer.hits, pricer.misses, fallback)

