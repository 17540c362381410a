"""Baseline two-copy recurrence protocols.

Every baseline here follows the same pattern on two copies (source and
target) of a state: optional depolarization, a local rotation ``U (x) U*`` on
each copy, a bilateral XOR from source to target, computational-basis
measurement of the target pair, and post-selection on equal outcomes.

* ``bbpssw`` -- isotropic twirl before every round, then the XOR step
  (the generalization of BBPSSW through the reduction protocol).
* ``dejmps`` -- qubits only; ``Rx(pi/2) (x) Rx(-pi/2)`` before the CNOTs.
* ``adgj`` -- discrete Fourier transform ``F (x) F*`` before the XOR.
* ``p1p2`` -- isotropic twirl once, then alternating P1 (plain XOR round)
  and P2 (the same round in the Fourier basis, rotated back afterwards).

The bilateral XOR is ``|i>|j> -> |i>|j - i>`` on both sides, which keeps
``|Omega_00>^{(x)2}`` invariant and accepts exactly the pairs of Bell states
with equal shift index.

Bell-diagonal inputs stay Bell-diagonal, so each round is also available as
a transition table on Bell spectra (computed once from the dense
simulation); the tables drive the Monte Carlo experiments.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..densmat import DensityOperator, partial_trace
from ..weyl import (
    BellSpectrum,
    bell_basis,
    bell_diagonal_matrix,
    bell_overlaps,
    bell_spectrum,
    check_prime,
    weyl_twirl,
)
from .base import IterationResult, is_bell_diagonal

BASELINES = ("bbpssw", "dejmps", "adgj", "p1p2")


def supports(protocol: str, d: int) -> bool:
    if protocol == "dejmps":
        return d == 2
    return protocol in BASELINES


def dft(d: int) -> np.ndarray:
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def xor_gate(d: int) -> np.ndarray:
    """``|i>|j> -> |i>|j - i>`` on (control, target)."""
    u = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            u[i * d + (j - i) % d, i * d + j] = 1.0
    return u


def isotropic_spectrum(p: np.ndarray) -> np.ndarray:
    """Bell spectrum after a ``U (x) U*`` twirl: keep p_00, flatten the rest."""
    p = np.asarray(p, dtype=float)
    out = np.full_like(p, (p.sum() - p[0]) / (p.shape[0] - 1))
    out[0] = p[0]
    return out


def isotropic_twirl(rho: DensityOperator) -> DensityOperator:
    d = check_prime(rho.dims[0])
    m = bell_diagonal_matrix(d, isotropic_spectrum(bell_overlaps(rho.matrix, d)))
    return DensityOperator(m, rho.dims, rho.side_a)


def _local_rotation(protocol: str, d: int, round_index: int):
    """(U, undo) applied to each copy before the XOR step; ``undo`` after."""
    if protocol == "dejmps":
        return rx(np.pi / 2), False
    if protocol == "adgj":
        return dft(d), False
    if protocol == "p1p2" and round_index % 2 == 1:
        return dft(d), True
    return None, False


def two_copy_round(two: np.ndarray, d: int, rot=None, undo: bool = False):
    """Bilateral XOR round on a two-copy state in A1 B1 A2 B2 order.

    Returns the unnormalized source state on (A1, B1) and its trace.
    """
    if rot is not None:
        r1 = np.kron(rot, rot.conj())
        r = np.kron(r1, r1)
        two = r @ two @ r.conj().T
    x = xor_gate(d)
    # XOR acts on (A1, A2) and (B1, B2); reorder A1 B1 A2 B2 -> A1 A2 B1 B2
    t = two.reshape((d,) * 8).transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(d**4, d**4)
    u = np.kron(x, x)
    t = u @ t @ u.T
    keep = np.zeros(d**4)
    for a1 in range(d):
        for b1 in range(d):
            for a in range(d):
                keep[((a1 * d + a) * d + b1) * d + a] = 1.0
    t = t * keep[:, None] * keep[None, :]
    out = partial_trace(t, keep=[0, 2], dims=(d, d, d, d))
    if rot is not None and undo:
        r1 = np.kron(rot, rot.conj()).conj().T
        out = r1 @ out @ r1.conj().T
    return out, float(np.trace(out).real)


@lru_cache(maxsize=None)
def transition_table(protocol: str, d: int, round_index: int = 0) -> np.ndarray:
    """``T[e, pos]``: unnormalized output Bell weights for input pair ``e``.

    For a Bell-diagonal input with spectrum ``p`` the round produces
    ``outer(p, p).ravel() @ T`` (before normalization).
    """
    rot, undo = _local_rotation(protocol, d, round_index)
    b = bell_basis(d)
    n = d * d
    table = np.zeros((n * n, n))
    for i in range(n):
        for j in range(n):
            psi = np.kron(b[:, i], b[:, j])
            out, _ = two_copy_round(np.outer(psi, psi.conj()), d, rot, undo)
            bm = b.conj().T @ out @ b
            off = bm - np.diag(np.diag(bm))
            if np.max(np.abs(off)) > 1e-10:
                raise RuntimeError(f"{protocol} round does not preserve Bell-diagonal form")
            table[i * n + j] = np.diag(bm).real
    table[np.abs(table) < 1e-15] = 0.0
    table.setflags(write=False)
    return table


def _table_key(protocol: str, round_index: int) -> int:
    return round_index % 2 if protocol == "p1p2" else 0


def baseline_spectrum_step(protocol: str, p: np.ndarray, d: int, round_index: int = 0):
    """One round on a Bell spectrum; returns ``(output_p, success_prob)``."""
    p = np.asarray(p, dtype=float)
    if protocol == "bbpssw" or (protocol == "p1p2" and round_index == 0):
        p = isotropic_spectrum(p)
    table = transition_table(protocol, d, _table_key(protocol, round_index))
    q = np.outer(p, p).ravel() @ table
    prob = float(q.sum())
    return q / prob, prob


def baseline_step(rho: DensityOperator, protocol: str, round_index: int = 0,
                  method: str = "fast") -> IterationResult:
    """One recurrence round of a baseline protocol on two copies of ``rho``.

    Inputs that are not Bell-diagonal are Weyl-twirled first (the isotropic
    twirl of ``bbpssw``/``p1p2`` subsumes this).
    """
    d = check_prime(rho.dims[0])
    if not supports(protocol, d):
        raise ValueError(f"protocol {protocol!r} is not available for d={d}")
    if method == "fast":
        out, prob = baseline_spectrum_step(protocol, bell_spectrum(rho).p, d, round_index)
        spec = BellSpectrum(d, np.clip(out, 0.0, None))
        return IterationResult(spec.to_state(), spec, prob, protocol)
    if method != "dense":
        raise ValueError(f"unknown method {method!r}")
    if protocol == "bbpssw" or (protocol == "p1p2" and round_index == 0):
        rho = isotropic_twirl(rho)
    elif not is_bell_diagonal(rho):
        rho = weyl_twirl(rho)
    rot, undo = _local_rotation(protocol, d, round_index)
    out, prob = two_copy_round(np.kron(rho.matrix, rho.matrix), d, rot, undo)
    out = out / prob
    state = DensityOperator((out + out.conj().T) / 2, (d, d))
    return IterationResult(state, bell_spectrum(state), prob, protocol)
