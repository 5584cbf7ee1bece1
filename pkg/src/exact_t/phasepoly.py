"""Phase polynomials over Boolean wires.

Monomials and parities are wire bitmasks: bit ``i`` stands for wire ``i``.
A :class:`ZetaPoly` is the exact multilinear phase in units of pi/4 (so
coefficients live in Z_8); a :class:`PhaseVecF2` keeps only the odd residue
class of each degree 1..3 coefficient, which is what T gates control.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Dict, Iterable, Iterator, List, Mapping, Tuple

from .gf2 import BitMatrix, BitVec

MAX_WIRES = 12


class NonRealizablePhase(ValueError):
    """A phase whose degree classes cannot come from a CNOT+T circuit."""


def popcount(x: int) -> int:
    return x.bit_count()


def mask_to_wires(mask: int) -> Tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if (mask >> i) & 1)


def wires_to_mask(wires: Iterable[int]) -> int:
    m = 0
    for w in wires:
        m |= 1 << w
    return m


class MonomialIndex:
    """Subsets of ``range(n)`` with size 1..3, degree-major then lexicographic."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one wire")
        self.n = n
        order: List[int] = []
        for d in (1, 2, 3):
            for ws in combinations(range(n), d):
                order.append(wires_to_mask(ws))
        self.masks: Tuple[int, ...] = tuple(order)
        self._pos = {m: i for i, m in enumerate(order)}

    @property
    def size(self) -> int:
        return len(self.masks)

    def __len__(self) -> int:
        return len(self.masks)

    def index(self, monomial: int) -> int:
        try:
            return self._pos[monomial]
        except KeyError:
            raise KeyError(f"monomial {mask_to_wires(monomial)} not indexed for n={self.n}") from None

    def monomial(self, i: int) -> int:
        return self.masks[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, MonomialIndex) and other.n == self.n

    def __hash__(self) -> int:
        return hash(("MonomialIndex", self.n))

    def __repr__(self) -> str:
        return f"MonomialIndex(n={self.n})"


@lru_cache(maxsize=None)
def monomial_index(n: int) -> MonomialIndex:
    return MonomialIndex(n)


def monomial_count(n: int) -> int:
    return comb(n, 1) + comb(n, 2) + comb(n, 3)


@dataclass(frozen=True)
class PhaseVecF2:
    index: MonomialIndex
    bits: BitVec

    def __post_init__(self):
        if self.bits.length != self.index.size:
            raise ValueError("phase vector length does not match monomial index")

    @classmethod
    def zero(cls, n: int) -> "PhaseVecF2":
        idx = monomial_index(n)
        return cls(idx, BitVec.zeros(idx.size))

    @classmethod
    def from_monomials(cls, n: int, monomials: Iterable[int]) -> "PhaseVecF2":
        idx = monomial_index(n)
        return cls(idx, BitVec.from_indices(idx.size, (idx.index(m) for m in monomials)))

    def monomials(self) -> List[int]:
        return [self.index.masks[i] for i in self.bits.indices()]

    def __xor__(self, other: "PhaseVecF2") -> "PhaseVecF2":
        if other.index != self.index:
            raise ValueError("index mismatch")
        return PhaseVecF2(self.index, self.bits ^ other.bits)

    def __bool__(self) -> bool:
        return bool(self.bits)


class ZetaPoly:
    """Multilinear polynomial with Z_8 coefficients, keyed by monomial mask.

    Mask 0 is the constant term.  Zero coefficients are never stored.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, int] | None = None):
        c: Dict[int, int] = {}
        if coeffs:
            for m, v in coeffs.items():
                v %= 8
                if v:
                    c[m] = v
        self._c = c

    @classmethod
    def var(cls, i: int) -> "ZetaPoly":
        return cls({1 << i: 1})

    @classmethod
    def monomial(cls, mask: int, coeff: int = 1) -> "ZetaPoly":
        return cls({mask: coeff})

    @classmethod
    def const(cls, value: int) -> "ZetaPoly":
        return cls({0: value})

    def items(self) -> Iterator[Tuple[int, int]]:
        return iter(sorted(self._c.items(), key=lambda kv: (popcount(kv[0]), kv[0])))

    def coeff(self, mask: int) -> int:
        return self._c.get(mask, 0)

    def as_dict(self) -> Dict[int, int]:
        return dict(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def __bool__(self) -> bool:
        return bool(self._c)

    def __eq__(self, other) -> bool:
        if isinstance(other, ZetaPoly):
            return self._c == other._c
        if other == 0:
            return not self._c
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def __add__(self, other: "ZetaPoly") -> "ZetaPoly":
        c = dict(self._c)
        for m, v in other._c.items():
            c[m] = c.get(m, 0) + v
        return ZetaPoly(c)

    def __neg__(self) -> "ZetaPoly":
        return ZetaPoly({m: -v for m, v in self._c.items()})

    def __sub__(self, other: "ZetaPoly") -> "ZetaPoly":
        return self + (-other)

    def scale(self, k: int) -> "ZetaPoly":
        return ZetaPoly({m: k * v for m, v in self._c.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        c: Dict[int, int] = {}
        for m1, v1 in self._c.items():
            for m2, v2 in other._c.items():
                m = m1 | m2  # x*x = x on 0/1 values
                c[m] = c.get(m, 0) + v1 * v2
        return ZetaPoly(c)

    __rmul__ = __mul__

    def degree(self) -> int:
        return max((popcount(m) for m in self._c), default=-1)

    def support(self) -> int:
        s = 0
        for m in self._c:
            s |= m
        return s

    def evaluate(self, assignment: int) -> int:
        """Value mod 8 at the 0/1 assignment whose bit ``i`` is wire ``i``."""
        return sum(v for m, v in self._c.items() if m & assignment == m) % 8

    def without_high_degree(self, max_degree: int = 3) -> "ZetaPoly":
        return ZetaPoly({m: v for m, v in self._c.items() if popcount(m) <= max_degree})

    def high_degree_part(self, min_degree: int = 4) -> "ZetaPoly":
        return ZetaPoly({m: v for m, v in self._c.items() if popcount(m) >= min_degree})

    def permute(self, wire_map: Mapping[int, int]) -> "ZetaPoly":
        return ZetaPoly({_map_mask(m, wire_map): v for m, v in self._c.items()})

    def __repr__(self) -> str:
        if not self._c:
            return "ZetaPoly(0)"
        parts = []
        for m, v in self.items():
            name = "*".join(f"x{i}" for i in mask_to_wires(m)) or "1"
            parts.append(f"{v}*{name}")
        return "ZetaPoly(" + " + ".join(parts) + ")"


def _map_mask(mask: int, wire_map: Mapping[int, int]) -> int:
    out = 0
    for w in mask_to_wires(mask):
        out |= 1 << wire_map[w]
    return out


def xor_lift(anf: Iterable[int]) -> ZetaPoly:
    """Integer lift of the XOR of ``anf``'s monomials, using a^b = a + b - 2ab."""
    acc = ZetaPoly()
    seen = set()
    for t in anf:
        if t in seen:
            raise ValueError("duplicate monomial in ANF")
        seen.add(t)
        term = ZetaPoly.monomial(t)
        acc = acc + term - (acc * term).scale(2)
    return acc


@lru_cache(maxsize=4096)
def parity_phase_z8(parity: int) -> ZetaPoly:
    """Phase of a single T applied to the parity of the wires in ``parity``.

    Closed form of the lift: every nonempty T within the support gets
    coefficient (-2)^(|T|-1).
    """
    if parity <= 0:
        raise ValueError("parity must be a nonzero mask")
    c = {}
    sub = parity
    while sub:
        c[sub] = (-2) ** (popcount(sub) - 1)
        sub = (sub - 1) & parity
    return ZetaPoly(c)


def reduce_f2(z: ZetaPoly, index: MonomialIndex, strict: bool = True) -> PhaseVecF2:
    """Odd residue classes of the degree 1..3 coefficients of ``z``.

    Degree-2 coefficients must be even and degree-3 ones divisible by 4.
    With ``strict`` a nonzero term of degree >= 4 is also rejected, since no
    Clifford+T phase block can produce it; constants are a global phase.
    """
    bits = 0
    for m, v in z.items():
        d = popcount(m)
        if d == 0:
            continue
        if m >> index.n:
            raise NonRealizablePhase(f"monomial {mask_to_wires(m)} outside {index.n} wires")
        if d >= 4:
            if strict:
                raise NonRealizablePhase(f"degree-{d} term {v}*{mask_to_wires(m)} is not zero mod 8")
            continue
        unit = 1 << (d - 1)
        if v % unit:
            raise NonRealizablePhase(
                f"degree-{d} coefficient {v} of {mask_to_wires(m)} is not a multiple of {unit}"
            )
        if (v // unit) & 1:
            bits |= 1 << index.index(m)
    return PhaseVecF2(index, BitVec(index.size, bits))


def parity_phase_f2(parity: int, index: MonomialIndex) -> PhaseVecF2:
    return PhaseVecF2(index, BitVec(index.size, _parity_column(parity, index.n)))


@lru_cache(maxsize=None)
def _parity_column(parity: int, n: int) -> int:
    if parity <= 0 or parity >> n:
        raise ValueError(f"parity {parity} is not a nonzero mask over {n} wires")
    idx = monomial_index(n)
    bits = 0
    for i, m in enumerate(idx.masks):
        if m & parity == m:
            bits |= 1 << i
    return bits


@lru_cache(maxsize=None)
def build_phi(n: int, limit: int = MAX_WIRES) -> BitMatrix:
    """M x K matrix; column ``k - 1`` is the F2 phase image of parity mask ``k``."""
    if n < 1:
        raise ValueError("need at least one wire")
    if n > limit:
        raise ValueError(f"{n} wires exceeds the limit of {limit}")
    idx = monomial_index(n)
    cols = [_parity_column(k, n) for k in range(1, 1 << n)]
    return BitMatrix.from_columns(idx.size, cols)
