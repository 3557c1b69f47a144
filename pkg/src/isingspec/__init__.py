"""Classical and quantum Ising spectral invariants for distinguishing graphs."""

import os as _os

# Propagate the package thread knob to the BLAS runtimes before numpy loads.
if "ISINGSPEC_THREADS" in _os.environ:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _os.environ["ISINGSPEC_THREADS"])

from ._kernels import BACKEND
from .classical import (
    InvariantReport,
    SignaturePolynomial,
    compare_invariants,
    energy_spectrum,
    longitudinal_spectrum,
    partition_function,
    signature_polynomial,
)
from .exceptions import BudgetError, ConvergenceError, GraphParseError
from .fixtures import FIXTURE_NAMES, fixture
from .graphs import (
    Graph,
    IntMatrix,
    IntPolynomial,
    adjacency_char_poly,
    adjacency_power,
    are_isomorphic,
    char_poly,
    encode_graph6,
    format_edge_list,
    parse_edge_list,
    parse_graph6,
)
from .observables import ObservableSet, batch_observables, state_observables

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BudgetError",
    "ConvergenceError",
    "FIXTURE_NAMES",
    "Graph",
    "GraphParseError",
    "IntMatrix",
    "IntPolynomial",
    "InvariantReport",
    "ObservableSet",
    "SignaturePolynomial",
    "adjacency_char_poly",
    "adjacency_power",
    "are_isomorphic",
    "batch_observables",
    "char_poly",
    "compare_invariants",
    "encode_graph6",
    "energy_spectrum",
    "fixture",
    "format_edge_list",
    "longitudinal_spectrum",
    "parse_edge_list",
    "parse_graph6",
    "partition_function",
    "signature_polynomial",
    "state_observables",
    "__version__",
]
