"""Dense GF(2) linear algebra on bit-packed integers.

Bit ``i`` of a row integer is column ``i``.  Python ints give arbitrary-width
packed words, so a 127-column row is still a single XOR.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple


@dataclass(frozen=True)
class BitVec:
    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("negative length")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits set beyond length")

    @classmethod
    def zeros(cls, length: int) -> "BitVec":
        return cls(length, 0)

    @classmethod
    def from_indices(cls, length: int, indices: Iterable[int]) -> "BitVec":
        bits = 0
        for i in indices:
            if not 0 <= i < length:
                raise IndexError(i)
            bits |= 1 << i
        return cls(length, bits)

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "BitVec":
        return cls.from_indices(len(values), (i for i, v in enumerate(values) if v & 1))

    @classmethod
    def from_string(cls, text: str) -> "BitVec":
        """Parse ``"1010"``; the leftmost character is bit 0."""
        return cls.from_list([int(c) for c in text])

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __len__(self) -> int:
        return self.length

    def __xor__(self, other: "BitVec") -> "BitVec":
        return xor_assign(self, other)

    def __and__(self, other: "BitVec") -> "BitVec":
        _check_len(self, other)
        return BitVec(self.length, self.bits & other.bits)

    def __bool__(self) -> bool:
        return self.bits != 0

    def popcount(self) -> int:
        return self.bits.bit_count()

    def dot(self, other: "BitVec") -> int:
        _check_len(self, other)
        return (self.bits & other.bits).bit_count() & 1

    def indices(self) -> List[int]:
        out, b = [], self.bits
        while b:
            low = b & -b
            out.append(low.bit_length() - 1)
            b ^= low
        return out

    def to_list(self) -> List[int]:
        return [(self.bits >> i) & 1 for i in range(self.length)]

    def __str__(self) -> str:
        return "".join(str(v) for v in self.to_list())


def _check_len(a: BitVec, b: BitVec) -> None:
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} != {b.length}")


def xor_assign(a: BitVec, b: BitVec) -> BitVec:
    _check_len(a, b)
    return BitVec(a.length, a.bits ^ b.bits)


@dataclass(frozen=True)
class BitMatrix:
    nrows: int
    ncols: int
    rows: Tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise ValueError("row count mismatch")
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise ValueError("row wider than ncols")

    @classmethod
    def from_rows(cls, ncols: int, rows: Iterable[int]) -> "BitMatrix":
        rows = tuple(rows)
        return cls(len(rows), ncols, rows)

    @classmethod
    def from_lists(cls, data: Sequence[Sequence[int]]) -> "BitMatrix":
        ncols = len(data[0]) if data else 0
        return cls.from_rows(ncols, (BitVec.from_list(r).bits for r in data))

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[int]) -> "BitMatrix":
        rows = [0] * nrows
        for j, col in enumerate(columns):
            c = col
            while c:
                low = c & -c
                rows[low.bit_length() - 1] |= 1 << j
                c ^= low
        return cls(nrows, len(columns), tuple(rows))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols, (0,) * nrows)

    def row(self, i: int) -> BitVec:
        return BitVec(self.ncols, self.rows[i])

    def column(self, j: int) -> BitVec:
        return BitVec(self.nrows, sum(((r >> j) & 1) << i for i, r in enumerate(self.rows)))

    def matvec(self, x: BitVec) -> BitVec:
        if x.length != self.ncols:
            raise ValueError("dimension mismatch")
        bits = 0
        for i, r in enumerate(self.rows):
            bits |= ((r & x.bits).bit_count() & 1) << i
        return BitVec(self.nrows, bits)

    def matmul(self, other: "BitMatrix") -> "BitMatrix":
        if self.ncols != other.nrows:
            raise ValueError("dimension mismatch")
        out = []
        for r in self.rows:
            acc = 0
            while r:
                low = r & -r
                acc ^= other.rows[low.bit_length() - 1]
                r ^= low
            out.append(acc)
        return BitMatrix(self.nrows, other.ncols, tuple(out))

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_columns(self.ncols, self.rows)

    def to_lists(self) -> List[List[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    def rank(self) -> int:
        return len(row_reduce(self)[1])


def _rref_rows(rows: List[int], ncols: int) -> List[int]:
    """In-place Gauss-Jordan on the low ``ncols`` bits; returns pivot columns."""
    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        bit = 1 << col
        pivot = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        prow = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= prow
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return pivots


def row_reduce(a: BitMatrix) -> Tuple[BitMatrix, List[int]]:
    rows = list(a.rows)
    pivots = _rref_rows(rows, a.ncols)
    return BitMatrix(a.nrows, a.ncols, tuple(rows)), pivots


def solve(a: BitMatrix, b: BitVec) -> Optional[BitVec]:
    """Particular solution of ``a @ x = b`` with free variables zeroed, or None."""
    if b.length != a.nrows:
        raise ValueError("dimension mismatch")
    flag = 1 << a.ncols
    rows = [r | (flag if (b.bits >> i) & 1 else 0) for i, r in enumerate(a.rows)]
    pivots = _rref_rows(rows, a.ncols)
    for row in rows[len(pivots):]:
        if row & flag:
            return None
    bits = 0
    for row, col in zip(rows, pivots):
        if row & flag:
            bits |= 1 << col
    return BitVec(a.ncols, bits)


def null_space_basis(a: BitMatrix) -> List[BitVec]:
    rows = list(a.rows)
    pivots = _rref_rows(rows, a.ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(a.ncols):
        if free in pivot_set:
            continue
        v = 1 << free
        for row, col in zip(rows, pivots):
            if (row >> free) & 1:
                v |= 1 << col
        basis.append(BitVec(a.ncols, v))
    return basis


def rank_of_vectors(vectors: Iterable[int], width: int) -> int:
    return len(_rref_rows(list(vectors), width))


class EchelonBasis:
    """Incremental XOR basis keyed by highest set bit.

    Reducing a vector against it yields the minimum element of its coset
    (as an integer), which gives a canonical representative.
    """

    def __init__(self):
        self._by_top = {}

    def __len__(self) -> int:
        return len(self._by_top)

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            b = self._by_top.get(top)
            if b is None:
                # lower bits may still reduce
                rest = v & ((1 << top) - 1)
                reduced = self.reduce(rest) if rest else 0
                return (1 << top) | reduced
            v ^= b
        return 0

    def add(self, v: int) -> bool:
        while v:
            top = v.bit_length() - 1
            b = self._by_top.get(top)
            if b is None:
                self._by_top[top] = v
                return True
            v ^= b
        return False

    def vectors(self) -> List[int]:
        return [self._by_top[k] for k in sorted(self._by_top)]
