"""Block-encodings, qubitization and quantum signal processing for Hamiltonian simulation,
checked against dense matrix oracles."""
from .encoding import (
    BlockEncoding,
    PauliDecomposition,
    PurifiedDensity,
    SignalSpectrum,
    SparseHamiltonian,
    dilation_encode,
    lcu_encode,
    purify_encode,
    signal_operator,
    sparse_encode,
    spectrum,
)
from .errors import CapacityError, ContractError, ConvergenceError, FileFormatError, HamsimError
from .linalg import Tolerances, expm_herm, herm_eig, is_unitary, kron, operator_distance
from .phases import ScalarModel, SolverReport, solve_phases, target_fourier, verify_phases
from .pipeline import bench_chem, bench_compare, bench_fig2, simulate, verify
from .planner import (
    bcks_queries,
    bessel_j,
    exact_trotter_error,
    plan_queries,
    qsp_gate_estimate,
    trotter_first_order_steps,
    trotter_suzuki_bound,
    truncation_error,
    upper_bound,
)
from .qsp import (
    PhaseSequence,
    check_achievable,
    chebyshev_block,
    extract_ABCD,
    observable_sequence,
    qsp_project,
    qsp_sequence,
)
from .qubitization import (
    QubitizedIterate,
    SU2Block,
    check_qubitized,
    hermitian_qubitize,
    iterate,
    normal_qubitize,
    phased_iterate,
    su2_block,
)

__version__ = "0.1.0"
