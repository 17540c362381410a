"""Random low-fidelity NPT states for the three state families.

Candidates are drawn in fixed-size chunks. Chunk ``c`` of a run with seed
``s`` uses its own generator seeded from ``SeedSequence(s, spawn_key=(tag,
c))``, so results do not depend on how chunks are scheduled, and the same
seed always reproduces the same sample set.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Iterable, Iterator

import numpy as np

from .densmat import NPT_TOL, DensityOperator, min_pt_eigenvalue, state_to_dict
from .weyl import (
    BellSpectrum,
    PhaseMatrix,
    bell_diagonal_matrix,
    bell_overlaps,
    check_prime,
    generalized_bell_basis,
)

FAMILIES = ("pure_haar", "bds_uniform", "gbds")
RESTRICTIONS = ("normal", "strict")
CHUNK = 256

_FAMILY_TAG = {"pure_haar": 1, "bds_uniform": 2, "gbds": 3}


@dataclass(frozen=True)
class SampleConfig:
    family: str
    d: int
    restriction: str = "normal"
    target_count: int = 1000
    seed: int = 0
    gbds_bases: int = 100
    gbds_states_per_basis: int = 100
    max_attempts: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.restriction not in RESTRICTIONS:
            raise ValueError(f"unknown restriction {self.restriction!r}")
        check_prime(self.d)
        if self.target_count < 1 or self.gbds_bases < 1 or self.gbds_states_per_basis < 1:
            raise ValueError("sample counts must be positive")

    def attempt_budget(self, target: int) -> int:
        return self.max_attempts if self.max_attempts is not None else 1000 * target


class FilterExhausted(RuntimeError):
    """Raised when the attempt budget runs out before enough states pass."""

    def __init__(self, message: str, result: "FilterResult"):
        super().__init__(message)
        self.result = result


@dataclass
class FilterResult:
    states: np.ndarray  # stack of accepted density matrices
    d: int
    attempts: int

    @property
    def accepted(self) -> int:
        return len(self.states)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0

    def density_operators(self) -> list[DensityOperator]:
        return [DensityOperator(m, (self.d, self.d)) for m in self.states]


def chunk_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


# -- single draws --------------------------------------------------------------


def haar_vectors(d: int, rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, d * d)) + 1j * rng.standard_normal((n, d * d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def sample_haar_pure(d: int, rng: np.random.Generator) -> DensityOperator:
    """Haar-random pure state on C^d (x) C^d."""
    psi = haar_vectors(check_prime(d), rng, 1)[0]
    return DensityOperator(np.outer(psi, psi.conj()), (d, d))


def flat_simplex(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    x = rng.standard_exponential((n, size))
    return x / x.sum(axis=1, keepdims=True)


def sample_bds(d: int, rng: np.random.Generator) -> BellSpectrum:
    """Bell spectrum drawn uniformly from the probability simplex."""
    d = check_prime(d)
    return BellSpectrum(d, flat_simplex(rng, 1, d * d)[0])


def gbds_matrices(phase: PhaseMatrix, weights: np.ndarray) -> np.ndarray:
    b = generalized_bell_basis(phase)
    return np.einsum("ia,na,ja->nij", b, weights, b.conj())


# -- candidate streams -------------------------------------------------------


def candidate_chunks(family: str, d: int, seed: int, phase: PhaseMatrix | None = None,
                     key: tuple[int, ...] = ()) -> Iterator[np.ndarray]:
    """Endless stream of candidate stacks, CHUNK states each."""
    tag = _FAMILY_TAG[family]
    c = 0
    while True:
        rng = chunk_rng(seed, tag, *key, c)
        if family == "pure_haar":
            v = haar_vectors(d, rng, CHUNK)
            yield np.einsum("ni,nj->nij", v, v.conj())
        elif family == "bds_uniform":
            yield bell_diagonal_matrix(d, flat_simplex(rng, CHUNK, d * d))
        else:
            yield gbds_matrices(phase, flat_simplex(rng, CHUNK, d * d))
        c += 1


def restriction_mask(mats: np.ndarray, d: int, restriction: str) -> np.ndarray:
    """Low-fidelity test on raw Bell overlaps of a stack of states."""
    ov = bell_overlaps(mats, d)
    if restriction == "normal":
        return ov[..., 0] <= 1.0 / d
    if restriction == "strict":
        return np.all(ov <= 1.0 / d, axis=-1)
    raise ValueError(f"unknown restriction {restriction!r}")


def accept_mask(mats: np.ndarray, d: int, restriction: str) -> np.ndarray:
    mask = restriction_mask(mats, d, restriction)
    if mask.any():
        idx = np.flatnonzero(mask)
        mask[idx] = min_pt_eigenvalue(mats[idx], (d, d)) < -NPT_TOL
    return mask


def filter_low_fidelity(stream: Iterable, d: int, restriction: str, target_count: int,
                        max_attempts: int | None = None) -> FilterResult:
    """Keep NPT states passing the fidelity restriction until ``target_count`` are found.

    Parameters
    ----------
    stream : iterable
        Yields :class:`DensityOperator` objects or stacks of density matrices.
    d : int
        Local dimension.
    restriction : {"normal", "strict"}
        ``normal`` requires ``<Omega_00|rho|Omega_00> <= 1/d``; ``strict``
        requires every Bell overlap to be at most ``1/d``.
    target_count : int
    max_attempts : int, optional
        Candidate budget, default ``1000 * target_count``.

    Raises
    ------
    FilterExhausted
        If the budget is used up; the partial result is attached.
    """
    d = check_prime(d)
    if max_attempts is None:
        max_attempts = 1000 * target_count
    if max_attempts < target_count:
        raise ValueError("max_attempts must be at least target_count")
    kept = []
    n_kept = 0
    attempts = 0
    for item in stream:
        mats = item.matrix[None] if isinstance(item, DensityOperator) else np.asarray(item)
        room = max_attempts - attempts
        mats = mats[:room]
        mask = accept_mask(mats, d, restriction)
        hits = np.flatnonzero(mask)
        need = target_count - n_kept
        if len(hits) >= need:
            hits = hits[:need]
            attempts += int(hits[-1]) + 1
        else:
            attempts += len(mats)
        kept.append(mats[hits])
        n_kept += len(hits)
        if n_kept >= target_count or attempts >= max_attempts:
            break
    states = np.concatenate(kept) if kept else np.zeros((0, d * d, d * d), dtype=complex)
    result = FilterResult(states, d, attempts)
    if n_kept < target_count:
        raise FilterExhausted(
            f"only {n_kept} of {target_count} states accepted after {attempts} attempts "
            f"(acceptance rate {result.acceptance_rate:.3g})",
            result,
        )
    return result


def sample_family(config: SampleConfig) -> FilterResult:
    """Filtered sample for the pure or standard Bell-diagonal family."""
    if config.family == "gbds":
        raise ValueError("use sample_gbds_system for the gbds family")
    stream = candidate_chunks(config.family, config.d, config.seed)
    return filter_low_fidelity(stream, config.d, config.restriction, config.target_count,
                               config.attempt_budget(config.target_count))


def sample_gbds_system(d: int, seed: int, basis_index: int, states_per_basis: int,
                       restriction: str = "normal", max_attempts: int | None = None,
                       phase: PhaseMatrix | None = None):
    """One random generalized Bell basis and filtered diagonal states in it.

    Returns ``(phase, FilterResult)``. Pass ``phase`` to fix the basis
    (e.g. ``PhaseMatrix.trivial(d)``).
    """
    d = check_prime(d)
    if phase is None:
        phase = PhaseMatrix.random(d, chunk_rng(seed, _FAMILY_TAG["gbds"], basis_index))
    stream = candidate_chunks("gbds", d, seed, phase, key=(basis_index, 1))
    if max_attempts is None:
        max_attempts = 1000 * states_per_basis
    return phase, filter_low_fidelity(stream, d, restriction, states_per_basis, max_attempts)


# -- persistence -------------------------------------------------------------


def write_jsonl(path, config: SampleConfig, states: Iterable) -> None:
    """Header line with the config, then one state per line."""
    with open(path, "w") as fh:
        fh.write(json.dumps({"config": asdict(config)}) + "\n")
        for m in states:
            rho = m if isinstance(m, DensityOperator) else DensityOperator(m, (config.d, config.d))
            fh.write(json.dumps(state_to_dict(rho)) + "\n")


def read_jsonl(path) -> tuple[SampleConfig, list[DensityOperator]]:
    from .densmat import state_from_dict

    with open(path) as fh:
        header = json.loads(fh.readline())
        states = [state_from_dict(json.loads(line)) for line in fh if line.strip()]
    return SampleConfig(**header["config"]), states
