"""Command-line front end: lib build/show, map, verify, stats, bench."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import bench as benchmod
from .circuit import CircuitError, Layout, QCircuit, emit_cover, read_qasm, write_qasm
from .library import (Library, LibraryFormatError, dumps, enumerate_quadratic_specs, load,
                      synthesize_library)
from .mapper import CutPricer, MapConfig, map_network, naive_t
from .solver import SolverConfig
from .verify import MAX_QUBITS, check_classical
from .xag import BlifError, XagError, XagNetwork, network_stats, parse_blif, parse_json

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_VERIFY = 5

REPORT_FORMAT = "exact-t-report"
REPORT_VERSION = 1

# config-file keys, their types and defaults; the command line wins over the file
KNOBS: Dict[str, tuple] = {
    "leaves": (int, 6),
    "cuts": (int, 8),
    "passes": (int, 3),
    "budget": (int, 256),
    "seed": (int, 0),
    "exact_limit": (int, 26),
    "restarts": (int, 3),
    "workers": (int, 1),
    "dont_cares": (lambda s: s.strip().lower() in ("1", "true", "yes", "on"), False),
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def read_config(path: str) -> Dict[str, object]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc.strerror}", EXIT_IO) from None
    out: Dict[str, object] = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{no}: expected key=value", EXIT_PARSE)
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in KNOBS:
            raise CliError(f"{path}:{no}: unknown key {key!r}", EXIT_PARSE)
        try:
            out[key] = KNOBS[key][0](value)
        except ValueError:
            raise CliError(f"{path}:{no}: bad value {value!r} for {key}", EXIT_PARSE) from None
    return out


def resolve_knobs(args: argparse.Namespace) -> Dict[str, object]:
    knobs = {k: default for k, (_, default) in KNOBS.items()}
    if getattr(args, "config", None):
        knobs.update(read_config(args.config))
    for k in KNOBS:
        v = getattr(args, k, None)
        if v is not None:
            knobs[k] = v
    return knobs


def solver_config(knobs: Dict[str, object], max_wires: int) -> SolverConfig:
    return SolverConfig(
        exact_nullity_limit=int(knobs["exact_limit"]),
        heuristic_budget=int(knobs["budget"]),
        restarts=int(knobs["restarts"]),
        seed=int(knobs["seed"]),
        use_dont_cares=bool(knobs["dont_cares"]),
        max_wires=max_wires,
        workers=int(knobs["workers"]),
    )


def map_config(knobs: Dict[str, object], lib_path: Optional[str] = None) -> MapConfig:
    try:
        return MapConfig(int(knobs["leaves"]), int(knobs["cuts"]), int(knobs["passes"]), lib_path,
                         int(knobs["budget"]))
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None


def read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from None


def write_outputs(files: Dict[str, str]) -> None:
    """Write all files or none: stage to temporaries, then rename."""
    staged = []
    try:
        for path, text in files.items():
            tmp = f"{path}.tmp{os.getpid()}"
            Path(tmp).write_text(text)
            staged.append((tmp, path))
        for tmp, path in staged:
            os.replace(tmp, path)
    except OSError as exc:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise CliError(f"cannot write output: {exc}", EXIT_IO) from None


def read_network(path: str) -> XagNetwork:
    text = read_text(path)
    try:
        if path.endswith(".json"):
            return parse_json(text)
        return parse_blif(text)
    except BlifError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None
    except (XagError, ValueError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None


def open_library(path: Optional[str], knobs: Dict[str, object], max_wires: int) -> Library:
    if path and os.path.exists(path):
        try:
            lib = load(path)
        except LibraryFormatError as exc:
            raise CliError(f"{path}: {exc}", EXIT_PARSE) from None
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from None
        if lib.config.use_dont_cares != bool(knobs["dont_cares"]):
            raise CliError(f"{path} was built with dont_cares={lib.config.use_dont_cares}", EXIT_USAGE)
        if lib.n_max < max_wires:
            raise CliError(f"{path} covers {lib.n_max} wires; cuts need {max_wires}", EXIT_USAGE)
        return lib
    return Library(max_wires, solver_config(knobs, max_wires))


# -- subcommands --------------------------------------------------------------

def cmd_lib_build(args: argparse.Namespace) -> int:
    knobs = resolve_knobs(args)
    if not 2 <= args.n <= 8:
        raise CliError("--n must be between 2 and 8", EXIT_USAGE)
    cfg = solver_config(knobs, args.n)
    specs = [s for k in range(2, args.n - args.outputs + 1) for s in enumerate_quadratic_specs(k, args.outputs)]
    t0 = time.perf_counter()
    lib = synthesize_library(args.n, specs, cfg)
    write_outputs({args.out: dumps(lib)})
    inexact = sum(1 for e in lib if not e.exact)
    print(f"{len(lib)} entries written to {args.out} ({inexact} inexact, {time.perf_counter() - t0:.1f}s)",
          file=sys.stderr)
    return EXIT_OK


def cmd_lib_show(args: argparse.Namespace) -> int:
    try:
        lib = load(args.lib)
    except LibraryFormatError as exc:
        raise CliError(f"{args.lib}: {exc}", EXIT_PARSE) from None
    except OSError as exc:
        raise CliError(f"cannot read {args.lib}: {exc.strerror}", EXIT_IO) from None
    print(f"N={lib.n_max} dont_cares={lib.config.use_dont_cares} entries={len(lib)}")
    hist: Dict[tuple, Dict[int, int]] = {}
    for e in lib:
        hist.setdefault((e.n, e.m), {})
        hist[(e.n, e.m)][e.t_count] = hist[(e.n, e.m)].get(e.t_count, 0) + 1
    for (n, m), h in sorted(hist.items()):
        body = " ".join(f"T{t}:{c}" for t, c in sorted(h.items()))
        print(f"n={n} m={m} {body}")
    if args.validate:
        try:
            lib.validate()
        except Exception as exc:  # any replay failure is a verification failure
            raise CliError(f"validation failed: {exc}", EXIT_VERIFY) from None
        print("validation passed")
    return EXIT_OK


def _node_name(net: XagNetwork, v: int) -> str:
    if v in net.pi_nodes:
        return net.pi_names[net.pi_nodes.index(v)]
    return f"n{v}"


def build_report(net: XagNetwork, circ: QCircuit, result, knobs: Dict[str, object],
                 lib: Library, input_path: str) -> Dict[str, object]:
    cover = result.cover
    cuts = []
    for v, c in cover.cuts.items():
        cuts.append({
            "node": _node_name(net, v),
            "leaves": [_node_name(net, l) for l in c.leaves],
            "anf": " ^ ".join("*".join(_node_name(net, x) for x in t) or "1"
                              for t in sorted(c.anf, key=lambda t: (len(t), t))),
            "t_count": c.t_cost,
            "exact": c.exact,
        })
    return {
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "input": os.path.basename(input_path),
        "config": dict(sorted(knobs.items())),
        "network": network_stats(net),
        "t_count": circ.t_count,
        "naive_t_count": naive_t(net),
        "clifford_count": circ.clifford_count,
        "qubits": circ.qubit_count,
        "gate_counts": circ.counts(),
        "exact": cover.exact,
        "library": {"entries": len(lib), "hits": result.hits, "misses": result.misses},
        "cuts": cuts,
    }


def cmd_map(args: argparse.Namespace) -> int:
    knobs = resolve_knobs(args)
    cfg = map_config(knobs, args.lib)
    net = read_network(args.input)
    lib = open_library(args.lib, knobs, cfg.max_leaves + 1)
    t0 = time.perf_counter()
    result = map_network(net, cfg, lib)
    t1 = time.perf_counter()
    circ, layout = emit_cover(net, result.cover, CutPricer(lib))
    emission = time.perf_counter() - t1
    timings = dict(result.times.as_dict(), emission=emission, total=time.perf_counter() - t0)
    report = build_report(net, circ, result, knobs, lib, args.input)
    if args.timings:
        report["timings"] = {k: round(v, 6) for k, v in timings.items()}
    files = {args.out: write_qasm(circ)}
    if args.report:
        files[args.report] = json.dumps(report, indent=2) + "\n"
    if args.layout:
        files[args.layout] = layout.to_json()
    if args.update_lib and args.lib:
        files[args.lib] = dumps(lib)
    write_outputs(files)
    print(f"T={circ.t_count} naive={report['naive_t_count']} cliffords={circ.clifford_count} "
          f"qubits={circ.qubit_count} exact={report['exact']}", file=sys.stderr)
    print("stage seconds: " + " ".join(f"{k}={v:.4f}" for k, v in timings.items()), file=sys.stderr)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    net = read_network(args.net)
    try:
        circ = read_qasm(read_text(args.circuit))
        layout = Layout.from_json(read_text(args.layout))
    except CircuitError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    if circ.n_qubits > MAX_QUBITS:
        raise CliError(f"{circ.n_qubits} qubits exceeds the simulation limit of {MAX_QUBITS}", EXIT_USAGE)
    verdict = check_classical(circ, net, layout)
    print(("PASS " if verdict.ok else "FAIL ") + verdict.message)
    return EXIT_OK if verdict.ok else EXIT_VERIFY


def cmd_stats(args: argparse.Namespace) -> int:
    net = read_network(args.input)
    print(json.dumps(network_stats(net), indent=2))
    return EXIT_OK


def _int_list(text: str) -> List[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("budgets must be positive")
    return vals


def cmd_bench(args: argparse.Namespace) -> int:
    knobs = resolve_knobs(args)
    cfg = map_config(knobs)
    nets = benchmod.small_networks() if args.set == "small" else benchmod.sweep_networks()
    lib = open_library(args.lib, knobs, cfg.max_leaves + 1)
    rows = benchmod.budget_sweep(nets, args.sweep_cuts, lib, cfg)
    text = benchmod.sweep_csv(rows)
    if args.out:
        write_outputs({args.out: text})
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def _add_knobs(p: argparse.ArgumentParser, mapping: bool) -> None:
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--budget", type=int, help="heuristic evaluations per solve")
    p.add_argument("--exact-limit", dest="exact_limit", type=int, help="largest search dimension solved exactly")
    p.add_argument("--restarts", type=int)
    p.add_argument("--dont-cares", dest="dont_cares", action="store_const", const=True,
                   help="use clean-ancilla don't-care Cliffords")
    if mapping:
        p.add_argument("--leaves", type=int)
        p.add_argument("--cuts", type=int)
        p.add_argument("--passes", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exact-t", description="XAG to Clifford+T compiler with exact T pricing")
    sub = parser.add_subparsers(dest="command", required=True)

    lib = sub.add_parser("lib", help="build or inspect a cut library")
    libsub = lib.add_subparsers(dest="lib_command", required=True)
    b = libsub.add_parser("build", help="solve every single-output class up to N wires")
    b.add_argument("--n", type=int, required=True, help="wire limit (inputs + outputs)")
    b.add_argument("--outputs", type=int, default=1)
    b.add_argument("--out", required=True)
    _add_knobs(b, mapping=False)
    b.set_defaults(func=cmd_lib_build)
    s = libsub.add_parser("show", help="summarize a library")
    s.add_argument("--lib", required=True)
    s.add_argument("--validate", action="store_true", help="replay every entry")
    s.set_defaults(func=cmd_lib_show)

    m = sub.add_parser("map", help="map a network and emit a circuit")
    m.add_argument("--in", dest="input", required=True)
    m.add_argument("--lib", help="library file; missing entries are solved on demand")
    m.add_argument("--update-lib", dest="update_lib", action="store_true", help="save new entries back")
    m.add_argument("--out", required=True, help="QASM output")
    m.add_argument("--report", help="JSON report")
    m.add_argument("--layout", help="qubit layout JSON for verify")
    m.add_argument("--timings", action="store_true", help="include stage timers in the report")
    _add_knobs(m, mapping=True)
    m.set_defaults(func=cmd_map)

    v = sub.add_parser("verify", help="simulate a circuit against a network")
    v.add_argument("--circuit", required=True)
    v.add_argument("--net", required=True)
    v.add_argument("--layout", required=True)
    v.set_defaults(func=cmd_verify)

    st = sub.add_parser("stats", help="network statistics")
    st.add_argument("--in", dest="input", required=True)
    st.set_defaults(func=cmd_stats)

    be = sub.add_parser("bench", help="geomean T versus cut budget on a fixed benchmark set")
    be.add_argument("--sweep-cuts", dest="sweep_cuts", type=_int_list, default=[1, 2, 4, 8, 16])
    be.add_argument("--set", choices=("small", "sweep"), default="small")
    be.add_argument("--lib")
    be.add_argument("--out", help="CSV output (default stdout)")
    _add_knobs(be, mapping=True)
    be.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
