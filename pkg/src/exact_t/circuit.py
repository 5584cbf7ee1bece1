"""Clifford+T circuits: lowering of solutions and covers, and a QASM 2.0 subset."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .mapper import CutPricer, Cover, Cut
from .quadratic import QuadraticSpec
from .solver import Solution, generator_wires
from .xag import XagNetwork, lit_compl, lit_node

GATES_1Q = ("H", "X", "T", "Tdg", "S", "Sdg", "Z")
GATES_2Q = ("CX", "CZ")
T_CLASS = ("T", "Tdg")

# one T-class gate per odd coefficient; even powers go through S/Z
T_WORDS: Dict[int, Tuple[str, ...]] = {1: ("T",), 7: ("Tdg",), 3: ("S", "T"), 5: ("Sdg", "Tdg")}
S_WORDS: Dict[int, Tuple[str, ...]] = {0: (), 1: ("S",), 2: ("Z",), 3: ("Sdg",)}


class Gate(NamedTuple):
    name: str
    qubits: Tuple[int, ...]


class CircuitError(ValueError):
    pass


@dataclass
class QCircuit:
    n_qubits: int
    gates: List[Gate] = field(default_factory=list)
    names: List[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.names:
            self.names = [f"q{i}" for i in range(self.n_qubits)]
        if len(self.names) != self.n_qubits:
            raise CircuitError("one name per qubit")
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        arity = 1 if g.name in GATES_1Q else 2 if g.name in GATES_2Q else None
        if arity is None:
            raise CircuitError(f"gate {g.name} is not in the gate set")
        if len(g.qubits) != arity or len(set(g.qubits)) != arity:
            raise CircuitError(f"gate {g.name} needs {arity} distinct qubits, got {g.qubits}")
        for q in g.qubits:
            if not 0 <= q < self.n_qubits:
                raise CircuitError(f"qubit {q} out of range for {self.n_qubits} qubits")

    def add(self, name: str, *qubits: int) -> None:
        g = Gate(name, tuple(qubits))
        self._check(g)
        self.gates.append(g)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self._check(g)
            self.gates.append(g)

    def add_qubit(self, name: str) -> int:
        self.names.append(name)
        self.n_qubits += 1
        return self.n_qubits - 1

    @property
    def t_count(self) -> int:
        return sum(1 for g in self.gates if g.name in T_CLASS)

    @property
    def clifford_count(self) -> int:
        return len(self.gates) - self.t_count

    @property
    def qubit_count(self) -> int:
        return self.n_qubits

    def counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for g in self.gates:
            out[g.name] = out.get(g.name, 0) + 1
        return dict(sorted(out.items()))


@dataclass
class Layout:
    """Which qubits carry the network inputs and outputs."""

    inputs: List[int]
    outputs: List[int]
    n_qubits: int

    def to_json(self) -> str:
        return json.dumps({"inputs": self.inputs, "outputs": self.outputs, "n_qubits": self.n_qubits},
                          indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Layout":
        try:
            d = json.loads(text)
            return cls([int(q) for q in d["inputs"]], [int(q) for q in d["outputs"]], int(d["n_qubits"]))
        except (ValueError, KeyError, TypeError) as exc:
            raise CircuitError(f"bad layout: {exc}") from None


# -- lowering -----------------------------------------------------------------

def t_word(coeff: int, q: int) -> List[Gate]:
    try:
        return [Gate(n, (q,)) for n in T_WORDS[coeff % 8]]
    except KeyError:
        raise CircuitError(f"T coefficient {coeff} is not odd") from None


def s_word(power: int, q: int) -> List[Gate]:
    return [Gate(n, (q,)) for n in S_WORDS[power % 4]]


def phase_gadget(qubits: Sequence[int], coeff: int) -> List[Gate]:
    """CNOT-fold the parity onto the highest qubit, rotate, unfold."""
    if not qubits:
        raise CircuitError("empty parity")
    qs = sorted(qubits)
    pivot = qs[-1]
    ladder = [Gate("CX", (q, pivot)) for q in qs[:-1]]
    return ladder + t_word(coeff, pivot) + ladder[::-1]


def _wire_map(sol: Solution, wires: Sequence[int]) -> Sequence[int]:
    if len(wires) != sol.n_wires:
        raise CircuitError(f"solution spans {sol.n_wires} wires but {len(wires)} were mapped")
    if len(set(wires)) != len(wires):
        raise CircuitError("wire map is not injective")
    return wires


def phase_layer(sol: Solution, wires: Sequence[int]) -> List[Gate]:
    """Parity gadgets then Clifford completion, on the mapped wires."""
    w = _wire_map(sol, wires)
    out: List[Gate] = []
    for mask, c in sol.parity_coeffs:
        out += phase_gadget([w[i] for i in range(sol.n_wires) if (mask >> i) & 1], c)
    for kind, a, b in sol.clifford_completion:
        if kind == "S":
            out += s_word(b, w[a])
        elif kind == "CZ":
            out.append(Gate("CZ", (w[a], w[b])))
        else:
            raise CircuitError(f"unknown completion gate {kind}")
    return out


def generator_gates(sol: Solution, n_inputs: int, wires: Sequence[int]) -> List[Gate]:
    """Don't-care Cliffords, applied once the outputs hold their values."""
    w = _wire_map(sol, wires)
    out: List[Gate] = []
    for ident, power in sol.chosen_free_gens:
        kind, ws = generator_wires(ident, n_inputs)
        if kind == "S":
            out += s_word(power, w[ws[0]])
        elif kind == "Z":
            out.append(Gate("Z", (w[ws[0]],)))
        else:
            out.append(Gate("CZ", (w[ws[0]], w[ws[1]])))
    return out


def _block(sol: Optional[Solution], n_inputs: int, wires: Sequence[int],
           fixups: Sequence[Tuple[int, Sequence[int], int]]) -> List[Gate]:
    """``fixups`` holds (target qubit, linear input qubits, constant) per output."""
    targets = [t for t, _, _ in fixups]
    out = [Gate("H", (t,)) for t in targets]
    if sol is not None:
        out += phase_layer(sol, wires)
    for t, lin, const in fixups:
        out += [Gate("CZ", (q, t)) for q in lin]
        if const:
            out.append(Gate("Z", (t,)))
    out += [Gate("H", (t,)) for t in targets]
    if sol is not None:
        out += generator_gates(sol, n_inputs, wires)
    return out


def emit_spec(spec: QuadraticSpec, sol: Optional[Solution], in_qubits: Sequence[int],
              out_qubits: Sequence[int]) -> List[Gate]:
    """Gates taking (x, 0) to (x, f(x)) for every output of ``spec``."""
    if len(in_qubits) != spec.n or len(out_qubits) != spec.m:
        raise CircuitError("qubit lists do not match the spec")
    fix = [(out_qubits[j], [in_qubits[i] for i in sorted(o.linear)], o.const)
           for j, o in enumerate(spec.outputs)]
    return _block(sol, spec.n, list(in_qubits) + list(out_qubits), fix)


def emit_cut(cut: Cut, sol: Optional[Solution], spec_inputs: Sequence[int],
             wire_of: Dict[int, int], target: int) -> List[Gate]:
    """Lower one cut; ``spec_inputs`` are the leaves behind the solution's input wires."""
    try:
        wires = [wire_of[leaf] for leaf in spec_inputs] + [target]
        lin = [wire_of[leaf] for leaf in cut.linear_terms]
    except KeyError as exc:
        raise CircuitError(f"leaf {exc.args[0]} of cut at {cut.root} has no qubit") from None
    if sol is None and cut.quadratic_terms:
        raise CircuitError(f"cut at {cut.root} is quadratic but has no solution")
    return _block(sol, len(spec_inputs), wires, [(target, lin, cut.const)])


def emit_cover(net: XagNetwork, cover: Cover, pricer: CutPricer) -> Tuple[QCircuit, Layout]:
    circ = QCircuit(0)
    wire_of: Dict[int, int] = {}
    for node, name in zip(net.pi_nodes, net.pi_names):
        wire_of[node] = circ.add_qubit(name)
    inputs = [wire_of[v] for v in net.pi_nodes]
    for v in sorted(cover.cuts):
        wire_of[v] = circ.add_qubit(f"n{v}")
    for v in sorted(cover.cuts):
        cut = cover.cuts[v]
        sol, _, spec_inputs = pricer.solution(cut)
        circ.extend(emit_cut(cut, sol, spec_inputs, wire_of, wire_of[v]))
    outputs: List[int] = []
    claimed = set()
    for name, literal in net.outputs:
        v, compl = lit_node(literal), lit_compl(literal)
        if v in cover.cuts and v not in claimed:
            q = wire_of[v]
            claimed.add(v)
        else:
            q = circ.add_qubit(f"out_{name}")
            if v in wire_of:
                circ.add("CX", wire_of[v], q)
            elif net.is_gate(v):
                raise CircuitError(f"output {name} is driven by uncovered node {v}")
        if compl:
            circ.add("X", q)
        outputs.append(q)
    return circ, Layout(inputs, outputs, circ.n_qubits)


# -- QASM ---------------------------------------------------------------------

_QASM_NAME = {"H": "h", "X": "x", "T": "t", "Tdg": "tdg", "S": "s", "Sdg": "sdg", "Z": "z",
              "CX": "cx", "CZ": "cz"}
_FROM_QASM = {v: k for k, v in _QASM_NAME.items()}


def write_qasm(circ: QCircuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    for i, name in enumerate(circ.names):
        lines.append(f"// qubit {i} {name}")
    lines.append(f"qreg q[{circ.n_qubits}];")
    for g in circ.gates:
        args = ",".join(f"q[{q}]" for q in g.qubits)
        lines.append(f"{_QASM_NAME[g.name]} {args};")
    return "\n".join(lines) + "\n"


_GATE_RE = re.compile(r"^([a-z]+)\s+(q\[\d+\](?:\s*,\s*q\[\d+\])*)\s*;$")
_QREG_RE = re.compile(r"^qreg\s+q\[(\d+)\]\s*;$")
_NAME_RE = re.compile(r"^//\s*qubit\s+(\d+)\s+(\S+)\s*$")


def read_qasm(text: str) -> QCircuit:
    n: Optional[int] = None
    names: Dict[int, str] = {}
    gates: List[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = _NAME_RE.match(line)
        if m:
            names[int(m.group(1))] = m.group(2)
            continue
        line = line.split("//", 1)[0].strip()
        if not line or line.startswith("OPENQASM") or line.startswith("include"):
            continue
        m = _QREG_RE.match(line)
        if m:
            if n is not None:
                raise CircuitError(f"line {lineno}: only one register is supported")
            n = int(m.group(1))
            continue
        m = _GATE_RE.match(line)
        if not m or m.group(1) not in _FROM_QASM:
            raise CircuitError(f"line {lineno}: unsupported statement {line!r}")
        if n is None:
            raise CircuitError(f"line {lineno}: gate before qreg")
        qubits = tuple(int(x) for x in re.findall(r"q\[(\d+)\]", m.group(2)))
        gates.append(Gate(_FROM_QASM[m.group(1)], qubits))
    if n is None:
        raise CircuitError("no qreg declaration")
    label = [names.get(i, f"q{i}") for i in range(n)]
    try:
        return QCircuit(n, gates, label)
    except CircuitError as exc:
        raise CircuitError(f"invalid circuit: {exc}") from None
