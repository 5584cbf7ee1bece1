"""Boolean functions whose outputs all have ANF degree <= 2."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import FrozenSet, Iterable, List, Sequence, Tuple

Pair = Tuple[int, int]


def _pair(a: int, b: int) -> Pair:
    if a == b:
        raise ValueError(f"quadratic monomial needs two distinct inputs, got ({a}, {b})")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class OutputAnf:
    quadratic: FrozenSet[Pair] = frozenset()
    linear: FrozenSet[int] = frozenset()
    const: int = 0

    @classmethod
    def make(cls, quadratic: Iterable[Sequence[int]] = (), linear: Iterable[int] = (), const: int = 0):
        return cls(frozenset(_pair(a, b) for a, b in quadratic), frozenset(linear), int(const) & 1)

    def monomials(self) -> List[int]:
        """ANF as input-wire bitmasks (0 is the constant term)."""
        out = [0] if self.const else []
        out.extend(1 << i for i in sorted(self.linear))
        out.extend((1 << a) | (1 << b) for a, b in sorted(self.quadratic))
        return out

    def evaluate(self, x: int) -> int:
        v = self.const
        for i in self.linear:
            v ^= (x >> i) & 1
        for a, b in self.quadratic:
            v ^= (x >> a) & (x >> b) & 1
        return v


@dataclass(frozen=True)
class QuadraticSpec:
    n: int
    outputs: Tuple[OutputAnf, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative input count")
        for out in self.outputs:
            for a, b in out.quadratic:
                if not (0 <= a < b < self.n):
                    raise ValueError(f"monomial ({a}, {b}) outside {self.n} inputs")
            for i in out.linear:
                if not 0 <= i < self.n:
                    raise ValueError(f"linear term {i} outside {self.n} inputs")

    @classmethod
    def from_terms(cls, n: int, outputs: Sequence[Sequence]) -> "QuadraticSpec":
        """``outputs`` items are ``(pairs,)``, ``(pairs, linear)`` or ``(pairs, linear, const)``."""
        return cls(n, tuple(OutputAnf.make(*o) for o in outputs))

    @property
    def m(self) -> int:
        return len(self.outputs)

    @property
    def n_wires(self) -> int:
        return self.n + self.m

    def evaluate(self, x: int) -> int:
        """Output bits packed little-endian, for input assignment ``x``."""
        y = 0
        for j, out in enumerate(self.outputs):
            y |= out.evaluate(x) << j
        return y

    def quadratic_only(self) -> "QuadraticSpec":
        return QuadraticSpec(self.n, tuple(OutputAnf(o.quadratic) for o in self.outputs))

    def is_linear(self) -> bool:
        return all(not o.quadratic for o in self.outputs)

    def permute(self, input_perm: Sequence[int], output_perm: Sequence[int]) -> "QuadraticSpec":
        """Input ``i`` becomes ``input_perm[i]``; output ``j`` moves to slot ``output_perm[j]``."""
        outs: List[OutputAnf] = [OutputAnf()] * self.m
        for j, o in enumerate(self.outputs):
            outs[output_perm[j]] = OutputAnf(
                frozenset(_pair(input_perm[a], input_perm[b]) for a, b in o.quadratic),
                frozenset(input_perm[i] for i in o.linear),
                o.const,
            )
        return QuadraticSpec(self.n, tuple(outs))


def all_pairs(n: int) -> List[Pair]:
    return list(combinations(range(n), 2))


def random_spec(rng: random.Random, n: int, m: int, density: float = 0.5,
                linear: bool = True) -> QuadraticSpec:
    outs = []
    pairs = all_pairs(n)
    for _ in range(m):
        quad = [p for p in pairs if rng.random() < density]
        lin = [i for i in range(n) if rng.random() < 0.5] if linear else []
        const = rng.randrange(2) if linear else 0
        outs.append(OutputAnf.make(quad, lin, const))
    return QuadraticSpec(n, tuple(outs))
