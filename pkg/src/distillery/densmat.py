"""Dense density operators on labeled tensor factors.

States are plain complex numpy arrays wrapped in :class:`DensityOperator`,
which remembers the per-factor dimensions and which factors sit on Alice's
side. Everything here is small (at most 81x81 for two copies of a qutrit
pair), so no attempt is made at sparse storage.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
NPT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive semidefinite matrix on a tensor product.

    Parameters
    ----------
    matrix : ndarray
        Square complex matrix of dimension ``prod(dims)``.
    dims : tuple of int
        Dimensions of the tensor factors, in matrix index order.
    side_a : tuple of int
        Indices of the factors held by Alice; the rest belong to Bob.
        Defaults to the first half of the factors.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    side_a: tuple[int, ...] = field(default=None)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        dims = tuple(int(x) for x in self.dims)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        if int(np.prod(dims)) != m.shape[0]:
            raise ValueError(f"factor dims {dims} do not multiply to {m.shape[0]}")
        side_a = self.side_a
        if side_a is None:
            side_a = tuple(range(len(dims) // 2)) if len(dims) > 1 else (0,)
        side_a = tuple(sorted(int(i) for i in side_a))
        if any(i < 0 or i >= len(dims) for i in side_a):
            raise ValueError(f"side_a {side_a} out of range for {len(dims)} factors")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "side_a", side_a)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def side_b(self) -> tuple[int, ...]:
        return tuple(i for i in range(len(self.dims)) if i not in self.side_a)

    def validate(self, tol: float = HERMITIAN_TOL) -> "DensityOperator":
        """Raise ``ValueError`` unless the state is a valid density operator."""
        m = self.matrix
        herm = np.max(np.abs(m - m.conj().T))
        if herm > tol:
            raise ValueError(f"not Hermitian: max |rho - rho^dag| = {herm:.3e}")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace is {tr!r}, expected 1")
        lmin = hermitian_spectrum(m)[0]
        if lmin < -PSD_TOL:
            raise ValueError(f"negative eigenvalue {lmin:.3e}")
        return self

    @classmethod
    def from_pure(cls, psi: np.ndarray, dims, side_a=None) -> "DensityOperator":
        psi = np.asarray(psi, dtype=complex).ravel()
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state vector has norm {norm!r}")
        return cls(np.outer(psi, psi.conj()), dims, side_a)

    @classmethod
    def maximally_mixed(cls, dims, side_a=None) -> "DensityOperator":
        n = int(np.prod(dims))
        return cls(np.eye(n, dtype=complex) / n, dims, side_a)

    def to_json(self) -> str:
        return json.dumps(state_to_dict(self))

    @classmethod
    def from_json(cls, text: str) -> "DensityOperator":
        return state_from_dict(json.loads(text))


def state_to_dict(rho: DensityOperator) -> dict:
    """Serializable form ``{"dims", "ab_split", "re", "im"}`` (row-major)."""
    return {
        "dims": list(rho.dims),
        "ab_split": list(rho.side_a),
        "re": rho.matrix.real.tolist(),
        "im": rho.matrix.imag.tolist(),
    }


def state_from_dict(obj: dict) -> DensityOperator:
    m = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
    return DensityOperator(m, tuple(obj["dims"]), tuple(obj.get("ab_split", ())) or None)


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices (or vectors)."""
    return reduce(np.kron, mats)


def _as_array(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho)


def partial_transpose(rho, factor=None, dims=None) -> np.ndarray:
    """Transpose the indices of one or more tensor factors.

    Parameters
    ----------
    rho : DensityOperator or ndarray
        State to transpose. A bare array needs ``dims``.
    factor : int, sequence of int or None
        Factor(s) to transpose. ``None`` means all of Bob's factors.
    dims : tuple of int, optional
        Factor dimensions when ``rho`` is a bare array (or a stack of arrays
        with leading batch axes).

    Returns
    -------
    ndarray
        The partially transposed matrix (batch shape preserved).
    """
    if isinstance(rho, DensityOperator):
        m, dims = rho.matrix, rho.dims
        if factor is None:
            factor = rho.side_b
    else:
        m = np.asarray(rho)
        if dims is None:
            raise ValueError("dims are required for a bare matrix")
        dims = tuple(dims)
        if factor is None:
            factor = tuple(range(len(dims) // 2, len(dims)))
    factors = (factor,) if np.isscalar(factor) else tuple(factor)
    n = len(dims)
    for f in factors:
        if not 0 <= f < n:
            raise ValueError(f"invalid factor {f} for {n} tensor factors")
    batch = m.shape[:-2]
    t = m.reshape(batch + dims + dims)
    nb = len(batch)
    axes = list(range(nb + 2 * n))
    for f in factors:
        axes[nb + f], axes[nb + n + f] = axes[nb + n + f], axes[nb + f]
    return t.transpose(axes).reshape(m.shape)


def partial_trace(rho, keep, dims) -> np.ndarray:
    """Trace out every factor not listed in ``keep`` (order of ``keep`` preserved)."""
    m = _as_array(rho)
    dims = tuple(dims)
    n = len(dims)
    keep = list(keep)
    drop = [i for i in range(n) if i not in keep]
    t = m.reshape(dims + dims)
    # move kept row axes, dropped axes paired, kept col axes
    perm = keep + drop + [n + i for i in keep] + [n + i for i in drop]
    t = t.transpose(perm)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    dd = int(np.prod([dims[i] for i in drop])) if drop else 1
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", t)


def hermitian_spectrum(m, tol: float = 1e-8) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix in ascending order.

    Raises
    ------
    ValueError
        If ``m`` is not square or deviates from Hermiticity by more than
        ``tol`` (max entrywise).
    """
    m = _as_array(m)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError("matrix must be square")
    dev = np.max(np.abs(m - np.swapaxes(m.conj(), -1, -2))) if m.size else 0.0
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (deviation {dev:.3e})")
    return np.linalg.eigvalsh(m)


def min_pt_eigenvalue(rho, dims=None) -> np.ndarray | float:
    """Smallest eigenvalue of Bob's partial transpose; works on stacks."""
    pt = partial_transpose(rho, None, dims)
    return np.linalg.eigvalsh(pt)[..., 0]


def is_npt(rho, tol: float = NPT_TOL, dims=None) -> bool:
    """True iff the partial transpose has an eigenvalue below ``-tol``."""
    return bool(min_pt_eigenvalue(rho, dims) < -tol)


def fidelity(rho, target) -> float:
    """Overlap ``<target|rho|target>`` with a pure state vector."""
    m = _as_array(rho)
    v = np.asarray(target, dtype=complex).ravel()
    if v.shape[0] != m.shape[0]:
        raise ValueError(f"dimension mismatch: state {m.shape[0]}, target {v.shape[0]}")
    val = np.vdot(v, m @ v)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"overlap has imaginary part {val.imag:.3e}; rho is not Hermitian")
    return float(val.real)
