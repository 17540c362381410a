"""Stabilizer-based two-copy entanglement distillation for prime-dimensional qudits."""

from .densmat import (
    DensityOperator,
    fidelity,
    is_npt,
    min_pt_eigenvalue,
    partial_trace,
    partial_transpose,
)
from .harness import (
    ShareReport,
    emit_report,
    reproduce_example,
    run_share_experiment,
)
from .protocols import (
    BASELINES,
    PROTOCOLS,
    DistillVerdict,
    classify_distillability,
    fimax_select,
    fimax_step,
    protocol_step,
)
from .sampling import FilterExhausted, SampleConfig, filter_low_fidelity
from .stabilizer import canonic_encoding, coset_of, partition_epsilon
from .weyl import (
    BellSpectrum,
    PhaseMatrix,
    WeylIndex,
    bell_basis,
    bell_diagonal_state,
    bell_spectrum,
    bell_state,
    two_copy_error_distribution,
    weyl_operator,
    weyl_twirl,
)

__version__ = "0.1.0"
