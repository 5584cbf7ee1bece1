from __future__ import annotations

import json

import pytest

from exact_t.cli import EXIT_IO, EXIT_OK, EXIT_PARSE, EXIT_USAGE, EXIT_VERIFY, main, read_config

AND_BLIF = ".model t\n.inputs a b\n.outputs y\n.names a b y\n11 1\n.end\n"
TWO_PRODUCTS = """.model t
.inputs a b c d
.outputs f
.names a b x
11 1
.names c d y
11 1
.names x y f
01 1
10 1
.end
"""


@pytest.fixture
def work(tmp_path):
    (tmp_path / "and.blif").write_text(AND_BLIF)
    (tmp_path / "two.blif").write_text(TWO_PRODUCTS)
    return tmp_path


def run_map(work, net="and.blif", *extra):
    return main(["map", "--in", str(work / net), "--out", str(work / "c.qasm"), "--report", str(work / "r.json"),
                 "--layout", str(work / "l.json"), *extra])


def test_map_single_and_then_verify(work):
    assert run_map(work) == EXIT_OK
    report = json.loads((work / "r.json").read_text())
    assert report["t_count"] == 7
    assert report["qubits"] == 3
    assert report["config"]["seed"] == 0
    assert report["exact"] is True
    assert main(["verify", "--circuit", str(work / "c.qasm"), "--net", str(work / "and.blif"),
                 "--layout", str(work / "l.json")]) == EXIT_OK


def test_map_is_byte_identical(work):
    assert run_map(work, "two.blif") == EXIT_OK
    first = (work / "c.qasm").read_text(), (work / "r.json").read_text()
    assert run_map(work, "two.blif") == EXIT_OK
    assert ((work / "c.qasm").read_text(), (work / "r.json").read_text()) == first
    assert json.loads(first[1])["t_count"] == 11


def test_timings_are_opt_in(work):
    assert run_map(work, "and.blif", "--timings") == EXIT_OK
    timings = json.loads((work / "r.json").read_text())["timings"]
    assert {"cut_enumeration", "area_flow", "library_lookup", "emission"} <= set(timings)


def test_missing_input_is_io_error_without_outputs(work):
    code = main(["map", "--in", str(work / "nope.blif"), "--out", str(work / "x.qasm"),
                 "--report", str(work / "x.json")])
    assert code == EXIT_IO
    assert not (work / "x.qasm").exists() and not (work / "x.json").exists()


def test_parse_error_exit_code(work):
    (work / "bad.blif").write_text(".model t\n.inputs a\n.outputs f\n.names a q f\n11 1\n.end\n")
    assert main(["stats", "--in", str(work / "bad.blif")]) == EXIT_PARSE


def test_verify_failure_exit_code(work, capsys):
    assert run_map(work) == EXIT_OK
    qasm = (work / "c.qasm").read_text()
    lines = qasm.splitlines()
    drop = next(i for i, l in enumerate(lines) if l.startswith("t ") or l.startswith("tdg "))
    (work / "bad.qasm").write_text("\n".join(lines[:drop] + lines[drop + 1:]) + "\n")
    code = main(["verify", "--circuit", str(work / "bad.qasm"), "--net", str(work / "and.blif"),
                 "--layout", str(work / "l.json")])
    assert code == EXIT_VERIFY
    assert "FAIL" in capsys.readouterr().out


def test_usage_errors(work):
    assert main([]) == EXIT_USAGE
    assert main(["map", "--in", str(work / "and.blif")]) == EXIT_USAGE
    assert run_map(work, "and.blif", "--leaves", "1") == EXIT_USAGE


def test_config_file_and_override(work):
    cfg = work / "run.cfg"
    cfg.write_text("# knobs\ncuts = 2\nseed=7\n")
    assert read_config(str(cfg)) == {"cuts": 2, "seed": 7}
    assert run_map(work, "and.blif", "--config", str(cfg), "--seed", "9") == EXIT_OK
    conf = json.loads((work / "r.json").read_text())["config"]
    assert conf["cuts"] == 2 and conf["seed"] == 9
    (work / "bad.cfg").write_text("colour = blue\n")
    assert run_map(work, "and.blif", "--config", str(work / "bad.cfg")) == EXIT_PARSE


def test_library_build_show_and_reuse(work, capsys):
    lib = work / "lib.txt"
    assert main(["lib", "build", "--n", "5", "--out", str(lib)]) == EXIT_OK
    first = lib.read_text()
    assert main(["lib", "build", "--n", "5", "--out", str(lib)]) == EXIT_OK
    assert lib.read_text() == first
    assert main(["lib", "show", "--lib", str(lib), "--validate"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "validation passed" in out and "n=4 m=1" in out
    # a 5-wire library cannot serve 6-leaf cuts
    assert run_map(work, "and.blif", "--lib", str(lib)) == EXIT_USAGE
    assert run_map(work, "and.blif", "--lib", str(lib), "--leaves", "4") == EXIT_OK
    assert run_map(work, "and.blif", "--lib", str(lib), "--leaves", "4", "--dont-cares") == EXIT_USAGE


def test_update_lib_persists_entries(work):
    lib = work / "grow.txt"
    assert run_map(work, "two.blif", "--lib", str(lib), "--update-lib") == EXIT_OK
    assert len(lib.read_text().splitlines()) > 1


def test_dont_cares_flag(work):
    assert run_map(work, "and.blif", "--dont-cares") == EXIT_OK
    report = json.loads((work / "r.json").read_text())
    assert report["t_count"] == 4
    assert main(["verify", "--circuit", str(work / "c.qasm"), "--net", str(work / "and.blif"),
                 "--layout", str(work / "l.json")]) == EXIT_OK


def test_stats(work, capsys):
    assert main(["stats", "--in", str(work / "two.blif")]) == EXIT_OK
    stats = json.loads(capsys.readouterr().out)
    assert stats["ands"] == 2 and stats["mc_anf"] == 2


def test_bench_csv(work):
    out = work / "sweep.csv"
    assert main(["bench", "--sweep-cuts", "1,2", "--out", str(out)]) == EXIT_OK
    rows = out.read_text().splitlines()
    assert rows[0] == "cuts,geomean_t,total_t,naive_total_t,exact"
    assert len(rows) == 3
    assert main(["bench", "--sweep-cuts", "0"]) == EXIT_USAGE


def test_json_network_input(work):
    from exact_t.xag import parse_blif, write_json
    (work / "two.json").write_text(write_json(parse_blif(TWO_PRODUCTS)))
    assert run_map(work, "two.json") == EXIT_OK
