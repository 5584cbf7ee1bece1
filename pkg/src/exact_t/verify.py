"""Statevector and phase-polynomial oracles for emitted circuits."""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .circuit import Gate, Layout, QCircuit
from .phasepoly import ZetaPoly, parity_phase_z8
from .xag import XagNetwork

MAX_QUBITS = 14
TOL = 1e-9

_W = cmath.exp(1j * cmath.pi / 4)
_DIAG = {"T": _W, "Tdg": _W.conjugate(), "S": 1j, "Sdg": -1j, "Z": -1}
_COEFF = {"T": 1, "Tdg": 7, "S": 2, "Sdg": 6, "Z": 4}


class SimulationError(ValueError):
    pass


class StateVector:
    def __init__(self, n_qubits: int, basis: int = 0):
        if n_qubits > MAX_QUBITS:
            raise SimulationError(f"{n_qubits} qubits exceeds the limit of {MAX_QUBITS}")
        if not 0 <= basis < 1 << n_qubits:
            raise SimulationError(f"basis state {basis} out of range")
        self.n = n_qubits
        self.amp = np.zeros(1 << n_qubits, dtype=complex)
        self.amp[basis] = 1.0
        self._idx = np.arange(1 << n_qubits)

    def _bit(self, q: int) -> np.ndarray:
        return (self._idx >> q) & 1

    def apply(self, g: Gate) -> None:
        a = self.amp
        if g.name == "H":
            (q,) = g.qubits
            v = a.reshape(-1, 2, 1 << q)
            lo, hi = v[:, 0, :].copy(), v[:, 1, :].copy()
            v[:, 0, :] = (lo + hi) / np.sqrt(2)
            v[:, 1, :] = (lo - hi) / np.sqrt(2)
        elif g.name == "X":
            (q,) = g.qubits
            v = a.reshape(-1, 2, 1 << q)
            v[:, [0, 1], :] = v[:, [1, 0], :]
        elif g.name in _DIAG:
            (q,) = g.qubits
            v = a.reshape(-1, 2, 1 << q)
            v[:, 1, :] *= _DIAG[g.name]
        elif g.name == "CX":
            c, t = g.qubits
            sel = np.nonzero((self._bit(c) == 1) & (self._bit(t) == 0))[0]
            other = sel | (1 << t)
            a[sel], a[other] = a[other].copy(), a[sel].copy()
        elif g.name == "CZ":
            c, t = g.qubits
            a[(self._bit(c) & self._bit(t)) == 1] *= -1
        else:
            raise SimulationError(f"unsupported gate {g.name}")

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amp, self.amp).real))


def simulate(circ: QCircuit, basis: int = 0, check_norm: bool = False) -> StateVector:
    sv = StateVector(circ.n_qubits, basis)
    for g in circ.gates:
        sv.apply(g)
        if check_norm and abs(sv.norm() - 1.0) > TOL:
            raise SimulationError(f"norm drifted after {g}")
    return sv


@dataclass
class Verdict:
    ok: bool
    message: str = ""
    assignment: Optional[int] = None
    expected: Optional[int] = None
    actual: Optional[int] = None

    def __bool__(self) -> bool:
        return self.ok


def _pack(bits: Sequence[int], state: int) -> int:
    y = 0
    for j, q in enumerate(bits):
        y |= ((state >> q) & 1) << j
    return y


def check_classical(circ: QCircuit, net: XagNetwork, layout: Layout) -> Verdict:
    """Every input basis state must land on one basis state with the right outputs.

    Inputs must be preserved, every other qubit starts clean, and the global
    phase has to agree across all assignments.
    """
    if layout.n_qubits != circ.n_qubits:
        return Verdict(False, f"layout has {layout.n_qubits} qubits, circuit has {circ.n_qubits}")
    if len(layout.inputs) != net.num_pis or len(layout.outputs) != net.num_pos:
        return Verdict(False, "layout does not match the network's inputs and outputs")
    if circ.n_qubits > MAX_QUBITS:
        return Verdict(False, f"{circ.n_qubits} qubits exceeds the simulation limit of {MAX_QUBITS}")
    phase0: Optional[complex] = None
    for x in range(1 << net.num_pis):
        start = 0
        for k, q in enumerate(layout.inputs):
            start |= ((x >> k) & 1) << q
        sv = simulate(circ, start)
        peak = int(np.argmax(np.abs(sv.amp)))
        amp = sv.amp[peak]
        want = net.simulate(x)
        if abs(abs(amp) - 1.0) > TOL:
            return Verdict(False, f"input {x:0{max(net.num_pis, 1)}b}: output is not a basis state "
                           f"(largest amplitude {abs(amp):.6f})", x, want, None)
        got = _pack(layout.outputs, peak)
        if got != want:
            return Verdict(False, f"input {x}: expected outputs {want:b}, got {got:b}", x, want, got)
        if _pack(layout.inputs, peak) != x:
            return Verdict(False, f"input {x}: input qubits were not preserved", x, want, got)
        if phase0 is None:
            phase0 = amp
        elif abs(amp - phase0) > TOL:
            return Verdict(False, f"input {x}: relative phase {cmath.phase(amp / phase0):.4f}", x, want, got)
    return Verdict(True, f"all {1 << net.num_pis} assignments agree")


# -- phase polynomial extraction ------------------------------------------------

Affine = Tuple[int, int]  # (parity mask over input wires, constant bit)


def _lift(parity: Affine) -> ZetaPoly:
    mask, const = parity
    base = parity_phase_z8(mask) if mask else ZetaPoly()
    return ZetaPoly.const(1) - base if const else base


def extract_phase_poly(gates: Sequence[Gate], n_qubits: int,
                       affine: bool = False) -> Tuple[ZetaPoly, List[Affine]]:
    """Phase (in units of pi/4) and final wire parities of a CX/diagonal block.

    Wire ``i`` ends up holding the XOR of the inputs in ``mask`` plus ``const``.
    ``X`` gates are accepted only with ``affine``.
    """
    wires: List[Affine] = [(1 << i, 0) for i in range(n_qubits)]
    poly = ZetaPoly()
    for g in gates:
        for q in g.qubits:
            if not 0 <= q < n_qubits:
                raise SimulationError(f"qubit {q} out of range")
        if g.name in _COEFF:
            poly = poly + _lift(wires[g.qubits[0]]).scale(_COEFF[g.name])
        elif g.name == "CX":
            c, t = g.qubits
            wires[t] = (wires[t][0] ^ wires[c][0], wires[t][1] ^ wires[c][1])
        elif g.name == "CZ":
            a, b = g.qubits
            poly = poly + (_lift(wires[a]) * _lift(wires[b])).scale(4)
        elif g.name == "X" and affine:
            q = g.qubits[0]
            wires[q] = (wires[q][0], wires[q][1] ^ 1)
        else:
            raise SimulationError(f"gate {g.name} is not allowed in a phase block")
    return poly, wires


def apply_affine(wires: Sequence[Affine], x: int) -> int:
    y = 0
    for i, (mask, const) in enumerate(wires):
        y |= ((bin(mask & x).count("1") + const) & 1) << i
    return y


def block_matches_simulation(gates: Sequence[Gate], n_qubits: int) -> bool:
    """Cross-check: the diagonal-times-permutation form against the simulator."""
    poly, wires = extract_phase_poly(gates, n_qubits, affine=True)
    circ = QCircuit(n_qubits, list(gates))
    for x in range(1 << n_qubits):
        sv = simulate(circ, x)
        want = np.zeros(1 << n_qubits, dtype=complex)
        want[apply_affine(wires, x)] = _W ** poly.evaluate(x)
        if np.max(np.abs(sv.amp - want)) > TOL:
            return False
    return True
