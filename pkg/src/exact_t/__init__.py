"""XAG to Clifford+T compilation with cuts priced by exact minimum T-count."""

from .circuit import Layout, QCircuit, emit_cover, read_qasm, write_qasm
from .library import Library, load, lookup, save, synthesize_library
from .mapper import Cover, Cut, CutPricer, MapConfig, cut_cost, enumerate_cuts, map_network, select_cover
from .quadratic import OutputAnf, QuadraticSpec
from .solver import Solution, SolverConfig, build_instance, derive_dont_cares, solve
from .verify import check_classical, simulate
from .xag import XagNetwork, parse_blif, parse_json, write_blif, write_json

__all__ = [
    "Cover", "Cut", "CutPricer", "Layout", "Library", "MapConfig", "OutputAnf", "QCircuit", "QuadraticSpec",
    "Solution", "SolverConfig", "XagNetwork", "build_instance", "check_classical", "cut_cost",
    "derive_dont_cares", "emit_cover", "enumerate_cuts", "load", "lookup", "map_network", "parse_blif",
    "parse_json", "read_qasm", "save", "select_cover", "simulate", "solve", "synthesize_library",
    "write_blif", "write_json", "write_qasm",
]
__version__ = "0.1.0"
