"""Weyl-Heisenberg operators, Bell bases and the Weyl twirl.

Bell indices ``(k, l)`` carry the phase index ``k`` and the shift index
``l``. Wherever a Bell index is flattened, the position is ``l * d + k``
(shift-major), so the vector ``(p_00, p_10, ..., p_{d-1,0}, p_01, ...)``
lists the diagonal of a Bell-diagonal state in the usual display order.

Two-copy error elements are 4-tuples ``(k1, l1, k2, l2)`` and flatten to
``bell_pos(k1, l1) * d**2 + bell_pos(k2, l2)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .densmat import DensityOperator, kron


class WeylIndex(NamedTuple):
    k: int
    l: int


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, int(n**0.5) + 1))


def check_prime(d: int) -> int:
    if not is_prime(int(d)):
        raise ValueError(f"dimension must be prime, got {d}")
    return int(d)


def omega(d: int) -> complex:
    return np.exp(2j * np.pi / d)


def bell_pos(k: int, l: int, d: int) -> int:
    """Shift-major position of Bell index ``(k, l)``."""
    return (l % d) * d + (k % d)


def bell_index(pos: int, d: int) -> WeylIndex:
    return WeylIndex(pos % d, pos // d)


def error_pos(e, d: int) -> int:
    k1, l1, k2, l2 = e
    return bell_pos(k1, l1, d) * d * d + bell_pos(k2, l2, d)


def error_element(pos: int, d: int) -> tuple[int, int, int, int]:
    a, b = divmod(pos, d * d)
    return (*bell_index(a, d), *bell_index(b, d))


@lru_cache(maxsize=None)
def _weyl(d: int, k: int, l: int) -> np.ndarray:
    w = np.zeros((d, d), dtype=complex)
    om = omega(d)
    for j in range(d):
        w[j, (j + l) % d] = om ** ((j * k) % d)
    w.setflags(write=False)
    return w


def weyl_operator(d: int, k: int, l: int) -> np.ndarray:
    """``W_{k,l} = sum_j omega^{jk} |j><j+l|`` as a d x d unitary."""
    check_prime(d)
    return _weyl(d, k % d, l % d)


def error_operator(d: int, e) -> np.ndarray:
    """Two-copy error operator ``W_{k1,l1} (x) W_{k2,l2}``."""
    k1, l1, k2, l2 = e
    return np.kron(weyl_operator(d, k1, l1), weyl_operator(d, k2, l2))


@lru_cache(maxsize=None)
def omega00(d: int) -> np.ndarray:
    v = np.zeros(d * d, dtype=complex)
    v[[i * d + i for i in range(d)]] = 1 / np.sqrt(d)
    v.setflags(write=False)
    return v


def bell_state(d: int, k: int, l: int) -> np.ndarray:
    """``|Omega_{k,l}> = (W_{k,l} (x) 1)|Omega_{0,0}>``."""
    return np.kron(weyl_operator(d, k, l), np.eye(d)) @ omega00(d)


@lru_cache(maxsize=None)
def bell_basis(d: int) -> np.ndarray:
    """Unitary whose column ``l*d + k`` is ``|Omega_{k,l}>``."""
    check_prime(d)
    cols = [bell_state(d, *bell_index(p, d)) for p in range(d * d)]
    b = np.column_stack(cols)
    b.setflags(write=False)
    return b


@dataclass(frozen=True, eq=False)
class BellSpectrum:
    """Probability vector over the d**2 Bell states, shift-major order."""

    d: int
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float).ravel()
        if p.shape[0] != self.d * self.d:
            raise ValueError(f"expected {self.d * self.d} entries, got {p.shape[0]}")
        if np.any(p < 0):
            raise ValueError("Bell weights must be non-negative")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def at(self, k: int, l: int) -> float:
        return float(self.p[bell_pos(k, l, self.d)])

    @property
    def total(self) -> float:
        return float(self.p.sum())

    def argmax(self) -> WeylIndex:
        return bell_index(int(np.argmax(self.p)), self.d)

    def to_state(self) -> DensityOperator:
        return bell_diagonal_state(self.d, self.p)

    def to_json(self) -> str:
        return json.dumps({"d": self.d, "p": self.p.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "BellSpectrum":
        obj = json.loads(text)
        return cls(int(obj["d"]), obj["p"])


def bell_diagonal_matrix(d: int, p) -> np.ndarray:
    """Dense matrix of ``sum_{k,l} p_{k,l} |Omega_{k,l}><Omega_{k,l}|``.

    ``p`` may carry leading batch axes.
    """
    b = bell_basis(d)
    p = np.asarray(p, dtype=float)
    return np.einsum("ia,...a,ja->...ij", b, p, b.conj())


def bell_diagonal_state(d: int, p) -> DensityOperator:
    return DensityOperator(bell_diagonal_matrix(d, p), (d, d))


@dataclass(frozen=True, eq=False)
class PhaseMatrix:
    """d x d matrix of unimodular phases ``alpha[s, t]``."""

    d: int
    alpha: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=complex)
        if a.shape != (self.d, self.d):
            raise ValueError(f"phase matrix must be {self.d}x{self.d}")
        if np.max(np.abs(np.abs(a) - 1.0)) > 1e-12:
            raise ValueError("phase matrix entries must have modulus 1")
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)

    @classmethod
    def trivial(cls, d: int) -> "PhaseMatrix":
        return cls(d, np.ones((d, d), dtype=complex))

    @classmethod
    def random(cls, d: int, rng: np.random.Generator) -> "PhaseMatrix":
        return cls(d, np.exp(2j * np.pi * rng.random((d, d))))

    def to_json(self) -> str:
        return json.dumps(
            {"d": self.d, "re": self.alpha.real.tolist(), "im": self.alpha.imag.tolist()}
        )

    @classmethod
    def from_json(cls, text: str) -> "PhaseMatrix":
        obj = json.loads(text)
        a = np.asarray(obj["re"]) + 1j * np.asarray(obj["im"])
        return cls(int(obj["d"]), a)


def generalized_weyl_operator(phase: PhaseMatrix, k: int, l: int) -> np.ndarray:
    """``V_{k,l} = sum_j omega^{jk} alpha_{j+l, l} |j><j+l|``."""
    d = phase.d
    om = omega(d)
    v = np.zeros((d, d), dtype=complex)
    for j in range(d):
        v[j, (j + l) % d] = om ** ((j * k) % d) * phase.alpha[(j + l) % d, l % d]
    return v


def generalized_bell_basis(phase: PhaseMatrix) -> np.ndarray:
    """Unitary with column ``l*d + k`` equal to ``(V_{k,l} (x) 1)|Omega_{0,0}>``."""
    d = check_prime(phase.d)
    eye = np.eye(d)
    cols = []
    for pos in range(d * d):
        k, l = bell_index(pos, d)
        cols.append(np.kron(generalized_weyl_operator(phase, k, l), eye) @ omega00(d))
    return np.column_stack(cols)


def _twirl_unitaries(d: int):
    for i in range(d):
        for j in range(d):
            yield np.kron(weyl_operator(d, i, j), weyl_operator(d, -i, j))


def weyl_twirl(rho: DensityOperator) -> DensityOperator:
    """Average ``rho`` over the d**2 local unitaries ``W_{i,j} (x) W_{-i,j}``."""
    if len(rho.dims) != 2 or rho.dims[0] != rho.dims[1]:
        raise ValueError(f"Weyl twirl needs a d x d bipartite state, got dims {rho.dims}")
    d = check_prime(rho.dims[0])
    m = rho.matrix
    out = np.zeros_like(m)
    for u in _twirl_unitaries(d):
        out += u @ m @ u.conj().T
    return DensityOperator(out / (d * d), rho.dims, rho.side_a)


def bell_overlaps(m: np.ndarray, d: int) -> np.ndarray:
    """Raw ``<Omega_{k,l}|m|Omega_{k,l}>`` for a matrix or a stack of matrices."""
    b = bell_basis(d)
    return np.einsum("ia,...ij,ja->...a", b.conj(), m, b).real


def bell_spectrum(rho, d: int | None = None) -> BellSpectrum:
    """Bell-basis diagonal of a single-copy bipartite state.

    Overlaps in ``(-1e-12, 0)`` are clamped to zero; anything more negative
    means ``rho`` is not a state and raises ``ValueError``.
    """
    if isinstance(rho, DensityOperator):
        d = rho.dims[0]
        m = rho.matrix
    else:
        m = np.asarray(rho)
        if d is None:
            d = int(round(np.sqrt(m.shape[0])))
    p = bell_overlaps(m, d)
    if np.any(p < -1e-12):
        raise ValueError(f"negative Bell overlap {p.min():.3e}")
    return BellSpectrum(d, np.clip(p, 0.0, None))


def two_copy_error_distribution(spec: BellSpectrum) -> np.ndarray:
    """Diagonal of the two-copy Bell-diagonal state, ``P[e] = p_{e1} p_{e2}``.

    Returns a length ``d**4`` array indexed by :func:`error_pos`.
    """
    return np.outer(spec.p, spec.p).ravel()


def error_distribution_dict(spec: BellSpectrum) -> dict[tuple[int, int, int, int], float]:
    dist = two_copy_error_distribution(spec)
    return {error_element(i, spec.d): float(v) for i, v in enumerate(dist)}


def bell_matrix(rho: DensityOperator) -> np.ndarray:
    """Matrix of ``rho`` expressed in the (shift-major) Bell basis."""
    b = bell_basis(rho.dims[0])
    return b.conj().T @ rho.matrix @ b


def two_copy_bell_basis(d: int) -> np.ndarray:
    """Columns ``|Omega(e)>`` in A1 B1 A2 B2 factor order, indexed by :func:`error_pos`."""
    b = bell_basis(d)
    return kron(b, b)
