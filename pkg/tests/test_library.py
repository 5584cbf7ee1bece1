from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exact_t.library import (Library, LibraryFormatError, canonicalize, dumps, enumerate_quadratic_specs, load,
                             loads, lookup, parse_entry, save, spec_from_key, synthesize_library)
from exact_t.quadratic import QuadraticSpec, random_spec
from exact_t.solver import SolverConfig, build_instance, check_solution

from oracles import spec_circuit_is_correct


def small_library(n_max=5, dont_cares=False):
    cfg = SolverConfig(max_wires=n_max, use_dont_cares=dont_cares)
    specs = [s for n in range(2, n_max) for s in enumerate_quadratic_specs(n)]
    return synthesize_library(n_max, specs, cfg)


@pytest.mark.parametrize("n,count", [(2, 1), (3, 3), (4, 10), (5, 33)])
def test_class_counts(n, count):
    assert sum(1 for _ in enumerate_quadratic_specs(n)) == count


def test_two_output_classes_are_distinct():
    keys = [canonicalize(s)[0] for s in enumerate_quadratic_specs(3, 2)]
    assert len(keys) == len(set(keys))


@given(st.integers(0, 10**6), st.integers(2, 5), st.integers(1, 2), st.booleans())
@settings(max_examples=60, deadline=None)
def test_key_is_permutation_invariant(seed, n, m, with_linear):
    rng = random.Random(seed)
    spec = random_spec(rng, n, m)
    perm = list(range(n))
    rng.shuffle(perm)
    operm = list(range(m))
    rng.shuffle(operm)
    key, ip, op = canonicalize(spec, with_linear)
    assert canonicalize(spec.permute(perm, operm), with_linear)[0] == key
    canon = spec.permute(ip, op)
    if not with_linear:
        canon = canon.quadratic_only()
    assert spec_from_key(key) == canon


def test_linear_terms_only_matter_with_dont_cares():
    a = QuadraticSpec.from_terms(3, [([(0, 1)], [2])])
    b = QuadraticSpec.from_terms(3, [([(0, 1)],)])
    assert canonicalize(a)[0] == canonicalize(b)[0]
    assert canonicalize(a, True)[0] != canonicalize(b, True)[0]


def test_round_trip_and_determinism(tmp_path):
    lib = small_library()
    text = dumps(lib)
    assert dumps(small_library()) == text
    path = tmp_path / "lib.txt"
    save(lib, path)
    again = load(path)
    assert dumps(again) == text
    assert again.entries == lib.entries
    again.validate()


def test_lookup_remaps_to_caller_wires():
    lib = small_library()
    rng = random.Random(9)
    for _ in range(20):
        spec = random_spec(rng, 4, 1, 0.5)
        if spec.is_linear():
            continue
        entry, ip, op = lookup(lib, spec)
        sol = entry.solution_for(ip, op)
        check_solution(build_instance(spec, lib.config), sol)
        assert spec_circuit_is_correct(spec, sol)


def test_lookup_with_dont_cares_remaps_generators():
    lib = Library(5, SolverConfig(max_wires=5, use_dont_cares=True))
    rng = random.Random(4)
    for _ in range(15):
        spec = random_spec(rng, 3, 1, 0.6)
        if spec.is_linear():
            continue
        lib.solve_and_insert(spec)
        entry, ip, op = lookup(lib, spec)
        sol = entry.solution_for(ip, op)
        check_solution(build_instance(spec, lib.config), sol)
        assert spec_circuit_is_correct(spec, sol)
    lib.validate()


def test_lookup_miss_and_out_of_range():
    lib = Library(5)
    assert lookup(lib, QuadraticSpec.from_terms(2, [([(0, 1)],)])) is None
    assert lookup(lib, QuadraticSpec.from_terms(5, [([(0, 1)],)])) is None


def test_duplicate_insert_rejected():
    lib = small_library(4)
    entry = next(iter(lib))
    with pytest.raises(ValueError):
        lib.insert(entry)


def test_newer_version_rejected():
    text = dumps(small_library(4)).replace("v1", "v9", 1)
    with pytest.raises(LibraryFormatError, match="newer"):
        loads(text)


def test_corrupt_line_names_line_number():
    lines = dumps(small_library(4)).splitlines()
    lines[2] = lines[2].replace(" 7 ", " 5 ", 1)
    with pytest.raises(LibraryFormatError, match="line 3"):
        loads("\n".join(lines))
    with pytest.raises(LibraryFormatError, match="line 1"):
        loads("garbage\n")
    with pytest.raises(LibraryFormatError):
        parse_entry("zz 1 1 2 1 3:1 - -")


def test_tampered_parities_fail_validation():
    lib = small_library(4)
    text = dumps(lib)
    # flip one T power to an even value by hand: parser refuses it
    bad = text.replace(":1,", ":2,", 1)
    with pytest.raises(LibraryFormatError):
        loads(bad)


def test_spec_from_key_rejects_bad_length():
    with pytest.raises(LibraryFormatError):
        spec_from_key(bytes([3, 1, 0, 0]))
