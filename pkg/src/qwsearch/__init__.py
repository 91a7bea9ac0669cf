"""Continuous-time quantum walk search on graphs.

Builds search Hamiltonians for graph families, reduces them to the
equitable-partition subspace, simulates the walk and runs a degenerate
perturbation analysis for critical jumping rates, gaps and runtimes.
"""

from .errors import (
    ComputationError,
    ContractViolation,
    InvalidParameterError,
    NoCrossingError,
    NoDegeneracyError,
    ParseError,
    QWSearchError,
)
from .graphs import (
    DenseHamiltonian,
    Family,
    GraphSpec,
    build_family,
    complete_graph,
    full_hamiltonian,
    hypercube_graph,
    load_edge_list,
    simplex_complete_graph,
    to_edge_list,
)
from .perturbation import (
    EffectiveSubspace,
    PerturbationSplit,
    SplitSpec,
    critical_gamma,
    effective_subspace,
    estimate_exponents,
    perturbative_runtime_report,
    split,
    table1_column,
)
from .quotient import (
    Partition,
    Quotient,
    ReducedHamiltonian,
    equitable_partition,
    family_quotient,
    hypercube_quotient,
    lift,
    quotient,
    quotient_hamiltonian,
    superposition_state,
)
from .spectral import (
    EvolutionResult,
    SpectralDecomposition,
    eigh,
    evolve_state,
    overlap_sweep,
    success_curve,
)

__version__ = "0.1.0"
