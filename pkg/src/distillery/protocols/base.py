from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from ..densmat import DensityOperator
from ..weyl import BellSpectrum, WeylIndex, bell_matrix

BELL_DIAGONAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class IterationResult:
    """Outcome of one successful recurrence round.

    ``spectrum`` is the Bell spectrum of ``output``; ``choice`` is a
    protocol-specific record (a :class:`StabilizerChoice` for FIMAX).
    """

    output: DensityOperator
    spectrum: BellSpectrum
    success_prob: float
    choice: Any = None
    correction: WeylIndex = WeylIndex(0, 0)

    @property
    def fidelity(self) -> float:
        return self.spectrum.at(0, 0)


def is_bell_diagonal(rho: DensityOperator, tol: float = BELL_DIAGONAL_TOL) -> bool:
    m = bell_matrix(rho)
    off = m - np.diag(np.diag(m))
    return bool(np.max(np.abs(off)) <= tol)


def shift_spectrum(p: np.ndarray, d: int, k: int, l: int) -> np.ndarray:
    """Bell spectrum after applying ``W_{k,l}^dagger (x) 1``.

    The weight on ``(k', l')`` moves to ``(k' - k, l' - l)``.
    """
    grid = np.asarray(p).reshape(d, d)  # [l, k]
    return np.roll(grid, shift=(-l, -k), axis=(0, 1)).ravel()
