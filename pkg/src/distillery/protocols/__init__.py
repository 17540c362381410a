from .base import IterationResult, is_bell_diagonal, shift_spectrum
from .classify import (
    PROTOCOLS,
    DistillVerdict,
    classify_distillability,
    classify_spectrum,
    protocol_step,
)
from .fimax import (
    FimaxTables,
    StabilizerChoice,
    fimax_select,
    fimax_spectrum_step,
    fimax_step,
    fimax_tables,
)
from .recurrence import BASELINES, baseline_spectrum_step, baseline_step, transition_table
