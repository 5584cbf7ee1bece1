"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""

from __future__ import annotations

import random
import time
from contextlib import contextmanager
from itertools import combinations

import pytest

from exact_t.bench import BENCH_SEED, budget_sweep, ratio_summary, small_networks, sweep_networks
from exact_t.circuit import Gate, emit_cover
from exact_t.gf2 import BitMatrix, BitVec, null_space_basis, solve as gf2_solve
from exact_t.library import Library, dumps, enumerate_quadratic_specs, load, save, synthesize_library
from exact_t.mapper import CutPricer, MapConfig, map_network, naive_t
from exact_t.phasepoly import ZetaPoly
from exact_t.quadratic import OutputAnf, QuadraticSpec, random_spec
from exact_t.solver import SolverConfig, SynthesisInstance, build_instance, check_solution, solve
from exact_t.verify import TOL, block_matches_simulation, check_classical

from oracles import brute_force_min_t, spec_circuit_is_correct


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def run(number: int, title: str, limit: float | None = None):
        notes: list = []
        t0 = time.perf_counter()
        status = "FAIL"
        try:
            yield notes
            elapsed = time.perf_counter() - t0
            if limit is not None:
                assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"
            status = "PASS"
        finally:
            elapsed = time.perf_counter() - t0
            extra = f" [{'; '.join(notes)}]" if notes else ""
            with capsys.disabled():
                print(f"\nACCEPTANCE {number:2d} {status} {title} ({elapsed:.2f}s){extra}")
    return run


def solve_spec(spec, dont_cares=False, **kw):
    cfg = SolverConfig(use_dont_cares=dont_cares, **kw)
    inst = build_instance(spec, cfg)
    return inst, solve(inst, cfg)


def test_01_two_parity_instance(criterion):
    with criterion(1, "four-monomial N=3 target needs two parities", limit=1.0) as notes:
        target = ZetaPoly({0b100: 1, 0b101: -2, 0b110: -2, 0b111: 4})
        inst = SynthesisInstance.from_target(3, target)
        sol = solve(inst)
        check_solution(inst, sol)
        notes.append(f"t={sol.t_count} parities={sorted(sol.parities)}")
        assert sol.t_count == 2
        assert sorted(sol.parities) == [0b011, 0b111]
        assert sol.exact


def test_02_single_and(criterion):
    with criterion(2, "single AND at N=3 needs seven T", limit=1.0) as notes:
        spec = QuadraticSpec.from_terms(2, [([(0, 1)],)])
        inst, sol = solve_spec(spec)
        check_solution(inst, sol)
        notes.append(f"t={sol.t_count}")
        assert sol.t_count == 7
        assert sol.parities == list(range(1, 8))
        assert spec_circuit_is_correct(spec, sol)


def test_03_brute_force_oracle(criterion):
    with criterion(3, "64 single-output n=3 specs match exhaustive coset search", limit=60.0) as notes:
        pairs = list(combinations(range(3), 2))
        checked = 0
        for qmask in range(8):
            for lmask in range(8):
                quad = [p for k, p in enumerate(pairs) if qmask >> k & 1]
                lin = [i for i in range(3) if lmask >> i & 1]
                spec = QuadraticSpec(3, (OutputAnf.make(quad, lin, 0),))
                _, sol = solve_spec(spec)
                assert sol.t_count == brute_force_min_t(spec), spec
                assert spec_circuit_is_correct(spec, sol)
                checked += 1
        notes.append(f"{checked} specs")
        assert checked == 64


def test_04_dont_care_monotonicity(criterion):
    with criterion(4, "don't-care generators never cost T", limit=300.0) as notes:
        rng = random.Random(BENCH_SEED)
        strict = 0
        for _ in range(200):
            spec = random_spec(rng, rng.randint(2, 4), rng.randint(1, 2), rng.uniform(0.3, 0.8))
            inst_off, off = solve_spec(spec)
            inst_on, on = solve_spec(spec, dont_cares=True)
            check_solution(inst_off, off)
            check_solution(inst_on, on)
            assert on.t_count <= off.t_count, spec
            strict += on.t_count < off.t_count
        notes.append(f"{strict}/200 strictly improved")
        assert strict >= 1


@pytest.fixture(scope="module")
def mapped_small(lib):
    cfg = MapConfig()
    out = []
    for net in small_networks():
        res = map_network(net, cfg, lib)
        circ, layout = emit_cover(net, res.cover, CutPricer(lib))
        out.append((net, res, circ, layout))
    return out


def test_05_end_to_end(criterion, lib):
    with criterion(5, "50 mapped networks verify by simulation", limit=600.0) as notes:
        cfg = MapConfig()
        worst_q = 0
        for net in small_networks():
            assert net.num_pis <= 5
            res = map_network(net, cfg, lib)
            circ, layout = emit_cover(net, res.cover, CutPricer(lib))
            assert len(res.cover.cuts) <= 6
            assert circ.n_qubits <= 11
            worst_q = max(worst_q, circ.n_qubits)
            verdict = check_classical(circ, net, layout)
            assert verdict.ok, verdict.message
            assert circ.t_count == res.cover.total_t
        notes.append(f"max qubits {worst_q}, tol {TOL:g}")


def test_06_cost_dominance(criterion, mapped_small):
    with criterion(6, "library-priced covers never exceed 7 per AND") as notes:
        mapped = [res.cover.total_t for _, res, _, _ in mapped_small]
        naive = [naive_t(net) for net, _, _, _ in mapped_small]
        for m, n in zip(mapped, naive):
            assert m <= n
        summary = ratio_summary(mapped, naive)
        notes.append(f"geomean ratio {summary['geomean_ratio']:.3f}, "
                     f"{int(summary['improved'])}/{len(mapped)} improved, total {sum(mapped)} vs {sum(naive)}")


def test_07_budget_sweep(criterion, lib):
    with criterion(7, "geomean T is non-increasing in the cut budget") as notes:
        rows = budget_sweep(sweep_networks(), [1, 2, 4, 8, 16], lib)
        notes.append(", ".join(f"C={r.cuts}:{r.geomean_t:.2f}{'' if r.exact else '*'}" for r in rows))
        for a, b in zip(rows, rows[1:]):
            assert b.geomean_t <= a.geomean_t + 1e-12, (a, b)


def test_08_phase_oracle_agreement(criterion):
    with criterion(8, "100 CX+T blocks: phase polynomial matches simulation") as notes:
        rng = random.Random(BENCH_SEED)
        for _ in range(100):
            n = rng.randint(1, 6)
            gates = []
            for _ in range(rng.randint(1, 30)):
                if n > 1 and rng.random() < 0.5:
                    gates.append(Gate("CX", tuple(rng.sample(range(n), 2))))
                else:
                    gates.append(Gate(rng.choice(("T", "Tdg")), (rng.randrange(n),)))
            assert block_matches_simulation(gates, n)
        notes.append(f"tol {TOL:g}")


def build_library(seed: int) -> Library:
    cfg = SolverConfig(max_wires=7, seed=seed)
    specs = [s for k in range(2, 6) for s in enumerate_quadratic_specs(k)]
    specs += [s for k in range(2, 5) for s in enumerate_quadratic_specs(k, 2)]
    rng = random.Random(seed)
    specs += [random_spec(rng, 6, 1, 0.5, linear=False) for _ in range(2)]
    return synthesize_library(7, specs, cfg)


def test_09_library_round_trip(criterion, tmp_path):
    with criterion(9, "library save/load identity, seeded determinism, full replay") as notes:
        lib = build_library(BENCH_SEED)
        text = dumps(lib)
        save(lib, tmp_path / "lib.txt")
        again = load(tmp_path / "lib.txt")
        assert dumps(again) == text
        assert again.entries == lib.entries
        assert dumps(build_library(BENCH_SEED)) == text
        again.validate()
        inexact = sum(1 for e in again if not e.exact)
        notes.append(f"{len(again)} entries, {inexact} inexact")


def random_matrix(rng: random.Random, nrows: int, ncols: int) -> BitMatrix:
    density = rng.uniform(0.05, 0.6)
    rows = [sum(1 << j for j in range(ncols) if rng.random() < density) for _ in range(nrows)]
    return BitMatrix.from_rows(ncols, rows)


def test_10_gf2_properties(criterion):
    with criterion(10, "GF(2) rank, solve and null space on 200 matrices", limit=10.0) as notes:
        rng = random.Random(BENCH_SEED)
        biggest = (0, 0)
        for k in range(200):
            nrows, ncols = (64, 128) if k == 0 else (rng.randint(1, 64), rng.randint(1, 128))
            biggest = max(biggest, (nrows, ncols))
            a = random_matrix(rng, nrows, ncols)
            basis = null_space_basis(a)
            assert a.rank() + len(basis) == ncols
            for v in basis:
                assert not a.matvec(v)
            b = a.matvec(BitVec(ncols, rng.getrandbits(ncols)))
            x = gf2_solve(a, b)
            assert x is not None and a.matvec(x) == b
            c = BitVec(nrows, rng.getrandbits(nrows))
            y = gf2_solve(a, c)
            if y is not None:
                assert a.matvec(y) == c
            else:
                assert a.rank() < nrows
        notes.append(f"largest {biggest[0]}x{biggest[1]}")
