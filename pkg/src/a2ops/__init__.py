"""Exact and numeric tools for commuting matrix-valued A2 differential operators."""
from .catalog import CATALOG, build
from .diffring import (DiffPoly, GeneratorTable, hyperbolic_table, jet_table,
                       solution_table)
from .elliptic import PotentialBackend, elliptic, hyperbolic, invcosh, rational, trig
from .opalgebra import MatDiffOp, commutator, compose
from .verify import CheckSpec, VerificationReport, run_all, run_check

__all__ = [
    "CATALOG", "build", "DiffPoly", "GeneratorTable", "hyperbolic_table", "jet_table",
    "solution_table", "PotentialBackend", "elliptic", "hyperbolic", "invcosh", "rational",
    "trig", "MatDiffOp", "commutator", "compose", "CheckSpec", "VerificationReport",
    "run_all", "run_check",
]
__version__ = "0.1.0"
