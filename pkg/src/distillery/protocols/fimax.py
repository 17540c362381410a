"""The FIMAX two-copy stabilizer distillation round.

Two evaluation routes are provided. :func:`fimax_step` with
``method="dense"`` simulates the full two-copy density matrix: twirl,
stabilizer measurements on both sides, post-selection, inverse encodings,
partial trace and correction. ``method="fast"`` works on the d**4 error
distribution only and uses the fact that, after decoding, every error
element ``e`` in the accepted class leaves a single Bell state behind. The
Bell label of that state is read off once per generator from the decoded
error operator (see :class:`FimaxTables`).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..densmat import DensityOperator, partial_trace
from ..stabilizer import (
    Coset,
    Element,
    all_elements,
    canonic_encoding,
    coset_of,
    generator_representatives,
    stabilizer_projectors,
    symplectic_product,
)
from ..weyl import (
    BellSpectrum,
    WeylIndex,
    bell_diagonal_state,
    bell_index,
    bell_pos,
    bell_spectrum,
    check_prime,
    error_element,
    error_operator,
    two_copy_error_distribution,
    weyl_operator,
    weyl_twirl,
)
from .base import IterationResult, is_bell_diagonal, shift_spectrum

TIE_TOL = 1e-12


@dataclass(frozen=True)
class StabilizerChoice:
    generator: Element
    s_max: int
    coset: Coset
    coset_prob: float
    success_prob: float

    @property
    def score(self) -> float:
        return self.coset_prob / self.success_prob


class FimaxTables:
    """Index tables over all generators for one prime dimension.

    Attributes
    ----------
    generators : tuple
        Generator representatives in flat (shift-major) order.
    sympl : ndarray, shape (G, d**4)
        Symplectic product of each generator with each error element.
    coset_id : ndarray, shape (G, d**4)
        Coset number of each element; cosets are numbered by the flat
        position of their representative.
    coset_class : ndarray, shape (G, d**3)
        Symplectic class of each coset.
    coset_rep : ndarray, shape (G, d**3)
        Flat position of each coset's smallest element.
    decoded : ndarray, shape (G, d**4)
        Shift-major Bell position left on the kept qudit pair by element
        ``e`` (before the correction).
    """

    def __init__(self, d: int):
        self.d = d = check_prime(d)
        self.generators = generator_representatives(d)
        elems = all_elements(d)
        n, nc = d**4, d**3
        G = len(self.generators)
        self.sympl = np.zeros((G, n), dtype=np.int64)
        self.coset_id = np.zeros((G, n), dtype=np.int64)
        self.coset_class = np.zeros((G, nc), dtype=np.int64)
        self.coset_rep = np.zeros((G, nc), dtype=np.int64)
        self.decoded = np.zeros((G, n), dtype=np.int64)
        pos_of = {e: i for i, e in enumerate(elems)}
        for gi, g in enumerate(self.generators):
            reps = sorted({coset_of(e, g, d).representative for e in elems},
                          key=lambda r: pos_of[r])
            rep_id = {r: c for c, r in enumerate(reps)}
            for i, e in enumerate(elems):
                self.sympl[gi, i] = symplectic_product(g, e, d)
                self.coset_id[gi, i] = rep_id[coset_of(e, g, d).representative]
            for c, r in enumerate(reps):
                self.coset_rep[gi, c] = pos_of[r]
                self.coset_class[gi, c] = symplectic_product(g, r, d)
            self.decoded[gi] = _decoded_labels(g, d, elems)

    def generator_index(self, g: Element) -> int:
        return self.generators.index(tuple(g))


def _decoded_labels(g: Element, d: int, elems) -> np.ndarray:
    # U^dag W(e) U maps |b>|k> to |b+s> (T_e |k>) with T_e a Weyl operator
    # up to phase; its Bell label is where e ends up after decoding.
    u = canonic_encoding(g, d).unitary
    weyls = np.stack([weyl_operator(d, *bell_index(p, d)) for p in range(d * d)])
    out = np.zeros(len(elems), dtype=np.int64)
    for i, e in enumerate(elems):
        s = symplectic_product(g, e, d)
        m = u.conj().T @ error_operator(d, e) @ u
        block = m[s * d:(s + 1) * d, 0:d]
        overlaps = np.abs(np.einsum("pij,ij->p", weyls.conj(), block)) / d
        best = int(np.argmax(overlaps))
        if abs(overlaps[best] - 1.0) > 1e-9:
            raise RuntimeError(f"decoded error for g={g}, e={e} is not a Weyl operator")
        out[i] = best
    return out


@lru_cache(maxsize=None)
def fimax_tables(d: int) -> FimaxTables:
    return FimaxTables(d)


def _as_distribution(dist, d: int | None):
    if isinstance(dist, dict):
        if d is None:
            d = int(round(len(dist) ** 0.25))
        arr = np.zeros(d**4)
        for e, v in dist.items():
            k1, l1, k2, l2 = e
            arr[bell_pos(k1, l1, d) * d * d + bell_pos(k2, l2, d)] = v
        return arr, d
    arr = np.asarray(dist, dtype=float).ravel()
    if d is None:
        d = int(round(arr.shape[0] ** 0.25))
    if arr.shape[0] != d**4:
        raise ValueError(f"error distribution must have {d**4} entries")
    return arr, d


def fimax_select(dist, d: int | None = None) -> StabilizerChoice:
    """Pick the stabilizer, symplectic class and coset maximizing P(C)/P(eps(s)).

    Parameters
    ----------
    dist : ndarray or dict
        Two-copy error distribution, either flat (``error_pos`` order) or a
        mapping from error elements to probabilities.
    d : int, optional
        Dimension; inferred from the size of ``dist`` if omitted.

    Notes
    -----
    Ties (within 1e-12) go to the larger P(eps(s)), then to the generator
    and coset representative that come first in flat error-element order
    (lexicographic in ``(l1, k1, l2, k2)``).
    """
    p, d = _as_distribution(dist, d)
    total = p.sum()
    if total <= 0:
        raise ValueError("error distribution has no mass")
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"error distribution sums to {total!r}, expected 1")
    t = fimax_tables(d)
    G = len(t.generators)
    nc = d**3
    offs = (np.arange(G) * d)[:, None]
    p_eps = np.bincount((t.sympl + offs).ravel(), weights=np.tile(p, G), minlength=G * d)
    p_eps = p_eps.reshape(G, d)
    offc = (np.arange(G) * nc)[:, None]
    p_coset = np.bincount((t.coset_id + offc).ravel(), weights=np.tile(p, G), minlength=G * nc)
    p_coset = p_coset.reshape(G, nc)
    denom = np.take_along_axis(p_eps, t.coset_class, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        score = np.where(denom > 0, p_coset / denom, -np.inf)
    best = score.max()
    cand = score >= best - TIE_TOL
    denom_c = np.where(cand, denom, -np.inf)
    cand &= denom_c >= denom_c.max() - TIE_TOL
    # row-major argmax = smallest generator, then smallest coset number
    gi, ci = np.unravel_index(int(np.argmax(cand)), cand.shape)
    g = t.generators[gi]
    rep = error_element(int(t.coset_rep[gi, ci]), d)
    return StabilizerChoice(
        generator=g,
        s_max=int(t.coset_class[gi, ci]),
        coset=coset_of(rep, g, d),
        coset_prob=float(p_coset[gi, ci]),
        success_prob=float(p_eps[gi, t.coset_class[gi, ci]]),
    )


def fimax_pre_correction(p: np.ndarray, d: int, choice: StabilizerChoice) -> np.ndarray:
    """Normalized Bell spectrum after decoding, before the correction."""
    t = fimax_tables(d)
    gi = t.generator_index(choice.generator)
    dist = np.outer(p, p).ravel()
    keep = t.sympl[gi] == choice.s_max
    q = np.bincount(t.decoded[gi][keep], weights=dist[keep], minlength=d * d)
    return q / q.sum()


def fimax_spectrum_step(spec: BellSpectrum):
    """One FIMAX round on a Bell spectrum.

    Returns ``(output_p, success_prob, choice, correction, pre_correction_p)``.
    """
    d = spec.d
    p = spec.p / spec.p.sum()
    choice = fimax_select(two_copy_error_distribution(BellSpectrum(d, p)), d)
    pre = fimax_pre_correction(p, d, choice)
    corr = bell_index(int(np.argmax(pre)), d)
    out = shift_spectrum(pre, d, corr.k, corr.l)
    return out, choice.success_prob, choice, corr, pre


# -- dense route -------------------------------------------------------------


def _two_copy_sides(rho: np.ndarray, d: int) -> np.ndarray:
    """rho (x) rho reordered from A1 B1 A2 B2 to A1 A2 B1 B2."""
    two = np.kron(rho, rho).reshape((d,) * 8)
    perm = [0, 2, 1, 3, 4, 6, 5, 7]
    return two.transpose(perm).reshape(d**4, d**4)


def _dense_round(rho: np.ndarray, d: int, choice: StabilizerChoice):
    enc_a = canonic_encoding(choice.generator, d, False)
    enc_b = canonic_encoding(choice.generator, d, True)
    proj_a = stabilizer_projectors(enc_a)
    proj_b = stabilizer_projectors(enc_b)
    big = _two_copy_sides(rho, d)
    accept = sum(np.kron(proj_a[(b + choice.s_max) % d], proj_b[b]) for b in range(d))
    kept = accept @ big @ accept
    prob = float(np.trace(kept).real)
    dec = np.kron(enc_a.unitary, enc_b.unitary).conj().T
    kept = dec @ kept @ dec.conj().T
    # factors are now (A outcome, A data, B outcome, B data)
    out = partial_trace(kept, keep=[1, 3], dims=(d, d, d, d))
    return out / prob, prob


def fimax_step(rho: DensityOperator, method: str = "fast") -> IterationResult:
    """Run one FIMAX round on two copies of ``rho``.

    Parameters
    ----------
    rho : DensityOperator
        Single-copy d x d state, d prime.
    method : {"fast", "dense"}
        Evaluation route; both give the same output for any input.
    """
    if len(rho.dims) != 2 or rho.dims[0] != rho.dims[1]:
        raise ValueError(f"FIMAX needs a single-copy d x d state, got dims {rho.dims}")
    d = check_prime(rho.dims[0])
    if method == "fast":
        out, prob, choice, corr, _ = fimax_spectrum_step(bell_spectrum(rho))
        spec = BellSpectrum(d, out)
        return IterationResult(spec.to_state(), spec, prob, choice, corr)
    if method != "dense":
        raise ValueError(f"unknown method {method!r}")
    if not is_bell_diagonal(rho):
        rho = weyl_twirl(rho)
    spec_in = bell_spectrum(rho)
    choice = fimax_select(two_copy_error_distribution(spec_in), d)
    m, prob = _dense_round(rho.matrix, d, choice)
    pre = bell_spectrum(m, d)
    corr = pre.argmax()
    w = np.kron(weyl_operator(d, *corr), np.eye(d)).conj().T
    m = w @ m @ w.conj().T
    out = DensityOperator((m + m.conj().T) / 2, (d, d))
    return IterationResult(out, bell_spectrum(out), prob, choice, corr)

