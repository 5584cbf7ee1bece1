"""Persistent map from canonical quadratic functions to minimum-T solutions."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .gf2 import BitVec
from .phasepoly import mask_to_wires
from .quadratic import OutputAnf, QuadraticSpec
from .solver import (
    Solution,
    SolverConfig,
    build_instance,
    check_solution,
    parse_generator_id,
    solve,
)

FORMAT_VERSION = 1
MAGIC = "EXACT-T-LIBRARY"


class LibraryFormatError(ValueError):
    pass


# -- canonical keys ------------------------------------------------------------

def _pair_bit(n: int) -> Dict[Tuple[int, int], int]:
    # first pair is the most significant bit, so keys compare like the tensor read row-major
    pairs = list(combinations(range(n), 2))
    return {p: len(pairs) - 1 - i for i, p in enumerate(pairs)}


def _output_bytes(out: OutputAnf, n: int, with_linear: bool) -> bytes:
    bits = _pair_bit(n)
    q = 0
    for p in out.quadratic:
        q |= 1 << bits[p]
    if not with_linear:
        return q.to_bytes(3, "big")
    lin = 0
    for i in out.linear:
        lin |= 1 << (n - 1 - i)
    return q.to_bytes(3, "big") + bytes([lin, out.const])


def _key_for(spec: QuadraticSpec, with_linear: bool) -> Tuple[bytes, List[int]]:
    chunks = [_output_bytes(o, spec.n, with_linear) for o in spec.outputs]
    order = sorted(range(spec.m), key=lambda j: chunks[j])
    head = bytes([spec.n, spec.m, 1 if with_linear else 0])
    return head + b"".join(chunks[j] for j in order), order


@lru_cache(maxsize=65536)
def canonicalize(spec: QuadraticSpec, with_linear: bool = False) -> Tuple[bytes, Tuple[int, ...], Tuple[int, ...]]:
    """Minimal key over all input and output permutations.

    Returns ``(key, input_perm, output_perm)`` such that
    ``spec.permute(input_perm, output_perm)`` is the canonical representative.
    Output order is resolved by sorting, so only input permutations are tried.
    """
    if spec.n > 7:
        raise ValueError("canonicalization is limited to 7 inputs")
    if not with_linear:
        spec = spec.quadratic_only()
    best = None
    for perm in permutations(range(spec.n)):
        key, order = _key_for(spec.permute(perm, range(spec.m)), with_linear)
        if best is None or key < best[0]:
            out_perm = [0] * spec.m
            for slot, j in enumerate(order):
                out_perm[j] = slot
            best = (key, tuple(perm), tuple(out_perm))
    if best is None:  # n == 0
        key, order = _key_for(spec, with_linear)
        out_perm = [0] * spec.m
        for slot, j in enumerate(order):
            out_perm[j] = slot
        best = (key, (), tuple(out_perm))
    return best


def spec_from_key(key: bytes) -> QuadraticSpec:
    n, m, with_linear = key[0], key[1], key[2]
    width = 5 if with_linear else 3
    if len(key) != 3 + m * width:
        raise LibraryFormatError(f"key of {len(key)} bytes does not fit n={n}, m={m}")
    pairs = list(combinations(range(n), 2))
    outs = []
    for j in range(m):
        chunk = key[3 + j * width: 3 + (j + 1) * width]
        q = int.from_bytes(chunk[:3], "big")
        quad = [p for i, p in enumerate(pairs) if (q >> (len(pairs) - 1 - i)) & 1]
        lin, const = ([i for i in range(n) if (chunk[3] >> (n - 1 - i)) & 1], chunk[4]) if with_linear else ([], 0)
        outs.append(OutputAnf.make(quad, lin, const))
    return QuadraticSpec(n, tuple(outs))


# -- entries -------------------------------------------------------------------

@dataclass(frozen=True)
class LibraryEntry:
    key: bytes
    t_count: int
    parity_coeffs: Tuple[Tuple[int, int], ...]
    free_gens: Tuple[Tuple[str, int], ...]
    completion: Tuple[Tuple[str, int, int], ...]
    exact: bool

    @property
    def n(self) -> int:
        return self.key[0]

    @property
    def m(self) -> int:
        return self.key[1]

    @property
    def n_wires(self) -> int:
        return self.n + self.m

    def spec(self) -> QuadraticSpec:
        return spec_from_key(self.key)

    def solution(self) -> Solution:
        """The stored solution, in canonical wire order."""
        K = (1 << self.n_wires) - 1
        sel = BitVec.from_indices(K, (k - 1 for k, _ in self.parity_coeffs))
        return Solution(self.n_wires, sel, self.parity_coeffs, self.free_gens, self.completion, self.exact)

    def solution_for(self, input_perm: Sequence[int], output_perm: Sequence[int]) -> Solution:
        """The stored solution relabelled onto the wires of the original spec."""
        n, m = self.n, self.m
        wire_of = {}
        for i, c in enumerate(input_perm):
            wire_of[c] = i
        for j, c in enumerate(output_perm):
            wire_of[n + c] = n + j
        out_of = {c: j for j, c in enumerate(output_perm)}
        in_of = {c: i for i, c in enumerate(input_perm)}

        def remap(mask: int) -> int:
            r = 0
            for w in mask_to_wires(mask):
                r |= 1 << wire_of[w]
            return r

        coeffs = tuple(sorted((remap(k), c) for k, c in self.parity_coeffs))
        gens = tuple(sorted((_remap_gen(g, out_of, in_of), e) for g, e in self.free_gens))
        comp = []
        for op, a, b in self.completion:
            if op == "S":
                comp.append(("S", wire_of[a], b))
            else:
                x, y = sorted((wire_of[a], wire_of[b]))
                comp.append(("CZ", x, y))
        K = (1 << (n + m)) - 1
        sel = BitVec.from_indices(K, (k - 1 for k, _ in coeffs))
        return Solution(n + m, sel, coeffs, gens, tuple(sorted(comp)), self.exact)

    @classmethod
    def from_solution(cls, key: bytes, sol: Solution) -> "LibraryEntry":
        return cls(key, sol.t_count, tuple(sorted(sol.parity_coeffs)), tuple(sorted(sol.chosen_free_gens)),
                   tuple(sorted(sol.clifford_completion)), sol.exact)


def _remap_gen(ident: str, out_of: Dict[int, int], in_of: Dict[int, int]) -> str:
    kind, j, other = parse_generator_id(ident)
    if kind in ("S", "Z"):
        return f"{kind}{out_of[j]}"
    if kind == "CZx":
        return f"CZ{out_of[j]}x{in_of[other]}"
    a, b = sorted((out_of[j], out_of[other]))
    return f"CZ{a}y{b}"


# -- the library ---------------------------------------------------------------

@dataclass
class Library:
    n_max: int
    config: SolverConfig = field(default_factory=SolverConfig)
    entries: Dict[bytes, LibraryEntry] = field(default_factory=dict)
    version: int = FORMAT_VERSION

    @property
    def with_linear(self) -> bool:
        # promised output values change the don't-care generators, so keys keep them
        return self.config.use_dont_cares

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[LibraryEntry]:
        return iter(self.entries[k] for k in sorted(self.entries))

    def key_of(self, spec: QuadraticSpec) -> Tuple[bytes, Tuple[int, ...], Tuple[int, ...]]:
        return canonicalize(spec, self.with_linear)

    def insert(self, entry: LibraryEntry) -> None:
        if entry.key in self.entries:
            raise ValueError(f"duplicate library key {entry.key.hex()}")
        self.entries[entry.key] = entry

    def solve_and_insert(self, spec: QuadraticSpec) -> LibraryEntry:
        key, _, _ = self.key_of(spec)
        if key in self.entries:
            return self.entries[key]
        canon = spec_from_key(key)
        cfg = self.config
        sol = solve(build_instance(canon, cfg), cfg)
        entry = LibraryEntry.from_solution(key, sol)
        self.entries[key] = entry
        return entry

    def validate(self) -> None:
        """Replay every entry against its canonical spec."""
        for entry in self:
            inst = build_instance(entry.spec(), self.config)
            sol = entry.solution()
            check_solution(inst, sol)
            if entry.t_count != sol.t_count:
                raise LibraryFormatError(f"entry {entry.key.hex()} t_count disagrees with its parities")


def lookup(lib: Library, spec: QuadraticSpec) -> Optional[Tuple[LibraryEntry, Tuple[int, ...], Tuple[int, ...]]]:
    if spec.n_wires > lib.n_max or spec.n > 7:
        return None
    key, in_perm, out_perm = lib.key_of(spec)
    entry = lib.entries.get(key)
    if entry is None:
        return None
    return entry, in_perm, out_perm


def synthesize_library(n_max: int, specs: Iterable[QuadraticSpec],
                       config: Optional[SolverConfig] = None) -> Library:
    """Solve one representative per canonical class.

    Phi and its kernel are cached per wire count, so they are built once.
    """
    cfg = config or SolverConfig(max_wires=n_max)
    lib = Library(n_max, cfg)
    for spec in specs:
        if spec.n_wires > n_max:
            raise ValueError(f"spec with {spec.n_wires} wires exceeds library limit {n_max}")
        if spec.is_linear():
            continue
        lib.solve_and_insert(spec)
    return lib


def enumerate_quadratic_specs(n: int, m: int = 1) -> Iterator[QuadraticSpec]:
    """One spec per permutation class of quadratic tensors on ``n`` inputs.

    Outputs with no quadratic term are skipped.  Each new code marks its whole
    orbit as seen, so the cost is (classes x permutations), not (codes x perms).
    """
    pairs = list(combinations(range(n), 2))
    npairs = len(pairs)
    pos = {p: i for i, p in enumerate(pairs)}
    perm_maps = []
    for perm in permutations(range(n)):
        perm_maps.append([pos[tuple(sorted((perm[a], perm[b])))] for a, b in pairs])
    seen = set()
    full = (1 << npairs) - 1
    for code in range(1, 1 << (npairs * m)):
        if code in seen:
            continue
        chunks = [(code >> (j * npairs)) & full for j in range(m)]
        for pm in perm_maps:
            moved = []
            for c in chunks:
                r = 0
                for i in range(npairs):
                    if (c >> i) & 1:
                        r |= 1 << pm[i]
                moved.append(r)
            for order in permutations(moved):
                seen.add(sum(c << (j * npairs) for j, c in enumerate(order)))
        if any(c == 0 for c in chunks):
            continue
        yield QuadraticSpec(n, tuple(
            OutputAnf(frozenset(p for i, p in enumerate(pairs) if (c >> i) & 1)) for c in chunks))


# -- persistence ---------------------------------------------------------------

def _fmt_pairs(items, fmt) -> str:
    return ",".join(fmt(*it) for it in items) or "-"


def format_entry(e: LibraryEntry) -> str:
    parities = _fmt_pairs(e.parity_coeffs, lambda k, c: f"{k}:{c}")
    gens = _fmt_pairs(e.free_gens, lambda g, p: f"{g}:{p}")
    comp = _fmt_pairs(e.completion, lambda op, a, b: f"{op}:{a}:{b}")
    return f"{e.key.hex()} {e.t_count} {int(e.exact)} {e.n} {e.m} {parities} {gens} {comp}"


def dumps(lib: Library) -> str:
    c = lib.config
    lines = [
        f"{MAGIC} v{lib.version} N={lib.n_max} dont_cares={int(c.use_dont_cares)} seed={c.seed} "
        f"exact_limit={c.exact_nullity_limit} inner={c.heuristic_inner_dim} "
        f"budget={c.heuristic_budget} restarts={c.restarts}"
    ]
    lines.extend(format_entry(e) for e in lib)
    return "\n".join(lines) + "\n"


def save(lib: Library, path: str | os.PathLike) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(dumps(lib))
    os.replace(tmp, path)


def _parse_header(line: str) -> Tuple[int, int, SolverConfig]:
    parts = line.split()
    if len(parts) < 3 or parts[0] != MAGIC or not parts[1].startswith("v"):
        raise LibraryFormatError("line 1: not an exact-T library header")
    try:
        version = int(parts[1][1:])
    except ValueError:
        raise LibraryFormatError(f"line 1: bad version {parts[1]!r}") from None
    if version > FORMAT_VERSION:
        raise LibraryFormatError(f"line 1: library version {version} is newer than supported {FORMAT_VERSION}")
    fields = {}
    for tok in parts[2:]:
        k, _, v = tok.partition("=")
        fields[k] = v
    try:
        n_max = int(fields["N"])
        cfg = SolverConfig(
            exact_nullity_limit=int(fields.get("exact_limit", 26)),
            heuristic_inner_dim=int(fields.get("inner", 22)),
            heuristic_budget=int(fields.get("budget", 256)),
            restarts=int(fields.get("restarts", 3)),
            seed=int(fields.get("seed", 0)),
            use_dont_cares=fields.get("dont_cares", "0") == "1",
            max_wires=n_max,
        )
    except (KeyError, ValueError) as exc:
        raise LibraryFormatError(f"line 1: bad header field ({exc})") from None
    return version, n_max, cfg


def parse_entry(line: str, lineno: int = 0) -> LibraryEntry:
    where = f"line {lineno}" if lineno else "entry"
    parts = line.split()
    if len(parts) != 8:
        raise LibraryFormatError(f"{where}: expected 8 fields, got {len(parts)}")
    try:
        key = bytes.fromhex(parts[0])
        t, exact, n, m = (int(x) for x in parts[1:5])
        coeffs = tuple(tuple(int(v) for v in tok.split(":")) for tok in _items(parts[5]))
        gens = tuple((tok.split(":")[0], int(tok.split(":")[1])) for tok in _items(parts[6]))
        comp = tuple((op, int(a), int(b)) for op, a, b in (tok.split(":") for tok in _items(parts[7])))
    except ValueError as exc:
        raise LibraryFormatError(f"{where}: {exc}") from None
    if len(key) < 3 or key[0] != n or key[1] != m:
        raise LibraryFormatError(f"{where}: key does not match n={n}, m={m}")
    try:
        spec_from_key(key)
    except LibraryFormatError as exc:
        raise LibraryFormatError(f"{where}: {exc}") from None
    if any(len(c) != 2 or c[1] % 2 == 0 or not 0 < c[0] < (1 << (n + m)) for c in coeffs):
        raise LibraryFormatError(f"{where}: bad parity list {parts[5]!r}")
    if t != len(coeffs):
        raise LibraryFormatError(f"{where}: t_count {t} but {len(coeffs)} parities")
    if any(op not in ("S", "CZ") for op, _, _ in comp):
        raise LibraryFormatError(f"{where}: bad completion list {parts[7]!r}")
    return LibraryEntry(key, t, coeffs, gens, comp, bool(exact))


def _items(tok: str) -> List[str]:
    return [] if tok == "-" else tok.split(",")


def loads(text: str) -> Library:
    lines = text.splitlines()
    if not lines:
        raise LibraryFormatError("line 1: empty library file")
    version, n_max, cfg = _parse_header(lines[0])
    lib = Library(n_max, cfg, version=FORMAT_VERSION)
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        entry = parse_entry(line, lineno)
        if entry.key in lib.entries:
            raise LibraryFormatError(f"line {lineno}: duplicate key")
        lib.entries[entry.key] = entry
    return lib


def load(path: str | os.PathLike) -> Library:
    with open(path, encoding="ascii") as fh:
        return loads(fh.read())


__all__ = [
    "Library", "LibraryEntry", "LibraryFormatError", "canonicalize", "dumps", "enumerate_quadratic_specs",
    "load", "loads", "lookup", "save", "spec_from_key", "synthesize_library",
]
