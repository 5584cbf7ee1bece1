from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exact_t.circuit import (GATES_1Q, GATES_2Q, CircuitError, Gate, Layout, QCircuit, emit_cover, emit_spec,
                             phase_gadget, read_qasm, t_word, write_qasm)
from exact_t.mapper import CutPricer, map_network
from exact_t.quadratic import QuadraticSpec
from exact_t.solver import SolverConfig, build_instance, solve
from exact_t.verify import check_classical, extract_phase_poly, simulate
from exact_t.xag import XagNetwork

from oracles import spec_circuit_is_correct


def random_circuit(rng: random.Random, n: int, length: int) -> QCircuit:
    c = QCircuit(n)
    for _ in range(length):
        if n > 1 and rng.random() < 0.4:
            c.add(rng.choice(GATES_2Q), *rng.sample(range(n), 2))
        else:
            c.add(rng.choice(GATES_1Q), rng.randrange(n))
    return c


def test_t_words_have_one_t_class_gate():
    for c in (1, 3, 5, 7):
        word = t_word(c, 0)
        assert sum(g.name in ("T", "Tdg") for g in word) == 1
        poly, _ = extract_phase_poly(word, 1)
        assert poly.coeff(1) == c
    with pytest.raises(CircuitError):
        t_word(2, 0)


def test_gadget_ladder_is_self_inverse():
    gates = phase_gadget([0, 2, 3], 1)
    stripped = [g for g in gates if g.name not in ("T", "Tdg")]
    _, wires = extract_phase_poly(stripped, 4)
    assert wires == [(1 << i, 0) for i in range(4)]
    assert gates[len(gates) // 2] == Gate("T", (3,))


def test_single_and_emission():
    spec = QuadraticSpec.from_terms(2, [([(0, 1)],)])
    sol = solve(build_instance(spec))
    gates = emit_spec(spec, sol, [0, 1], [2])
    assert sum(g.name in ("T", "Tdg") for g in gates) == 7
    assert [g.name for g in gates].count("H") == 2
    assert spec_circuit_is_correct(spec, sol)


def test_linear_cut_is_cnots():
    spec = QuadraticSpec.from_terms(2, [([], [0, 1])])
    gates = emit_spec(spec, None, [0, 1], [2])
    assert [g.name for g in gates] == ["H", "CZ", "CZ", "H"]
    assert spec_circuit_is_correct(spec, None)


def test_constant_one_is_x():
    spec = QuadraticSpec.from_terms(1, [([], [], 1)])
    gates = emit_spec(spec, None, [0], [1])
    assert [g.name for g in gates] == ["H", "Z", "H"]
    c = QCircuit(2, gates)
    assert abs(abs(simulate(c, 0).amp[0b10]) - 1) < 1e-9


def test_wire_map_must_fit():
    spec = QuadraticSpec.from_terms(2, [([(0, 1)],)])
    sol = solve(build_instance(spec))
    with pytest.raises(CircuitError):
        emit_spec(spec, sol, [0, 1, 2], [3])
    with pytest.raises(CircuitError):
        emit_spec(spec, sol, [0, 0], [2])


def test_single_and_cover(lib):
    net = XagNetwork()
    a, b = net.add_pi("a"), net.add_pi("b")
    net.add_output(net.add_and(a, b), "y")
    res = map_network(net, lib=lib)
    circ, layout = emit_cover(net, res.cover, CutPricer(lib))
    assert circ.qubit_count == 3 and circ.t_count == 7
    assert check_classical(circ, net, layout).ok


def test_outputs_on_inputs_and_shared_nodes(lib):
    net = XagNetwork()
    a, b = net.add_pi("a"), net.add_pi("b")
    g = net.add_and(a, b)
    net.add_output(g, "p")
    net.add_output(g ^ 1, "q")
    net.add_output(a ^ 1, "r")
    net.add_output(1, "one")
    net.add_output(0, "zero")
    res = map_network(net, lib=lib)
    circ, layout = emit_cover(net, res.cover, CutPricer(lib))
    assert len(set(layout.outputs)) == 5
    assert check_classical(circ, net, layout).ok


def test_xor_tree_has_no_t(lib):
    net = XagNetwork()
    xs = [net.add_pi() for _ in range(4)]
    net.add_output(net.add_xor(net.add_xor(xs[0], xs[1]), net.add_xor(xs[2], xs[3])))
    res = map_network(net, lib=lib)
    circ, layout = emit_cover(net, res.cover, CutPricer(lib))
    assert circ.t_count == 0
    assert check_classical(circ, net, layout).ok


def test_empty_circuit_qasm():
    c = QCircuit(0)
    text = write_qasm(c)
    back = read_qasm(text)
    assert back.n_qubits == 0 and back.gates == []


@given(st.integers(0, 10**6))
@settings(max_examples=100, deadline=None)
def test_qasm_round_trip(seed):
    rng = random.Random(seed)
    c = random_circuit(rng, rng.randint(1, 6), rng.randint(0, 40))
    back = read_qasm(write_qasm(c))
    assert back.gates == c.gates
    assert back.names == c.names
    assert back.counts() == c.counts()
    assert write_qasm(back) == write_qasm(c)


def test_qasm_reader_errors():
    with pytest.raises(CircuitError, match="line 3"):
        read_qasm("OPENQASM 2.0;\nqreg q[2];\nccx q[0],q[1];\n")
    with pytest.raises(CircuitError):
        read_qasm("OPENQASM 2.0;\nh q[0];\n")
    with pytest.raises(CircuitError):
        read_qasm("OPENQASM 2.0;\nqreg q[1];\ncx q[0],q[0];\n")


def test_gate_validation():
    c = QCircuit(2)
    with pytest.raises(CircuitError):
        c.add("CCX", 0, 1)
    with pytest.raises(CircuitError):
        c.add("H", 2)
    c.add("T", 0)
    c.add("CZ", 0, 1)
    assert c.t_count == 1 and c.clifford_count == 1


def test_layout_json():
    lay = Layout([0, 1], [3], 4)
    assert Layout.from_json(lay.to_json()) == lay
    with pytest.raises(CircuitError):
        Layout.from_json("{}")
