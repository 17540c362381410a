import numpy as np
import pytest
from scipy import stats

from distillery.densmat import DensityOperator, min_pt_eigenvalue
from distillery.sampling import (
    FilterExhausted,
    SampleConfig,
    accept_mask,
    candidate_chunks,
    chunk_rng,
    filter_low_fidelity,
    haar_vectors,
    read_jsonl,
    sample_bds,
    sample_family,
    sample_gbds_system,
    sample_haar_pure,
    write_jsonl,
)
from distillery.weyl import (
    PhaseMatrix,
    bell_diagonal_matrix,
    bell_diagonal_state,
    bell_overlaps,
    bell_pos,
    bell_state,
    generalized_bell_basis,
)


def test_haar_state_is_pure():
    rho = sample_haar_pure(3, np.random.default_rng(0))
    rho.validate()
    ev = np.linalg.eigvalsh(rho.matrix)
    assert ev[-2] <= 1e-10


def test_haar_state_reproducible():
    a = sample_haar_pure(2, np.random.default_rng(42))
    b = sample_haar_pure(2, np.random.default_rng(42))
    assert np.array_equal(a.matrix, b.matrix)


@pytest.mark.parametrize("d", [2, 3])
def test_haar_mean_fidelity(d):
    v = haar_vectors(d, np.random.default_rng(7), 100_000)
    f = np.abs(v @ bell_state(d, 0, 0).conj()) ** 2
    sigma = f.std() / np.sqrt(len(f))
    assert abs(f.mean() - 1 / d**2) <= 3 * sigma


def test_haar_invariance_ks():
    rng = np.random.default_rng(11)
    v = haar_vectors(3, rng, 10_000)
    q, _ = np.linalg.qr(rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9)))
    target = bell_state(3, 0, 0)
    f1 = np.abs(v @ target.conj()) ** 2
    f2 = np.abs((v @ q.T) @ target.conj()) ** 2
    assert stats.ks_2samp(f1, f2).pvalue > 1e-3


def test_bds_is_on_simplex():
    spec = sample_bds(3, np.random.default_rng(0))
    assert spec.total == pytest.approx(1.0)
    assert np.all(spec.p >= 0)


def test_bds_corner_fraction_and_means():
    rng = np.random.default_rng(1)
    p = np.array([sample_bds(2, rng).p for _ in range(100_000)])
    frac = np.mean(p.max(axis=1) > 0.5)
    assert frac == pytest.approx(0.5, abs=0.02)
    sigma = p.std(axis=0) / np.sqrt(len(p))
    assert np.all(np.abs(p.mean(axis=0) - 0.25) <= 3 * sigma)


def test_gbds_with_trivial_phases_is_standard_bds():
    _, res = sample_gbds_system(3, 5, 0, 20, phase=PhaseMatrix.trivial(3))
    for m in res.states:
        p = bell_overlaps(m, 3)
        assert np.allclose(m, bell_diagonal_matrix(3, p), atol=1e-12)


def test_gbds_states_diagonal_in_own_basis():
    phase, res = sample_gbds_system(3, 5, 1, 30)
    b = generalized_bell_basis(phase)
    for rho in res.density_operators():
        rho.validate()
        m = b.conj().T @ rho.matrix @ b
        assert np.max(np.abs(m - np.diag(np.diag(m)))) <= 1e-10


def test_filter_rejects_product_state():
    zero = np.zeros(4)
    zero[0] = 1
    rho = DensityOperator.from_pure(zero, (2, 2))
    assert not accept_mask(rho.matrix[None], 2, "normal")[0]


def test_filter_accepts_worked_example_state():
    p = np.full(9, 1 / 18)
    p[bell_pos(2, 1, 3)] = 5 / 9
    rho = bell_diagonal_state(3, p)
    res = filter_low_fidelity([rho], 3, "normal", 1)
    assert res.accepted == 1 and res.attempts == 1


def test_qubit_strict_bds_exhausts():
    stream = candidate_chunks("bds_uniform", 2, 0)
    with pytest.raises(FilterExhausted) as info:
        filter_low_fidelity(stream, 2, "strict", 10, max_attempts=5000)
    assert info.value.result.accepted == 0
    assert info.value.result.attempts == 5000
    assert info.value.result.acceptance_rate == 0


def test_filter_budget_must_cover_target():
    with pytest.raises(ValueError):
        filter_low_fidelity([], 2, "normal", 10, max_attempts=5)


@pytest.mark.parametrize("family", ["pure_haar", "bds_uniform"])
@pytest.mark.parametrize("restriction", ["normal", "strict"])
def test_accepted_states_satisfy_restriction(family, restriction):
    res = sample_family(SampleConfig(family, 3, restriction, 200, seed=4))
    assert res.accepted == 200
    ov = bell_overlaps(res.states, 3)
    if restriction == "normal":
        assert np.all(ov[:, 0] <= 1 / 3)
    else:
        assert np.all(ov <= 1 / 3)
    assert np.all(min_pt_eigenvalue(res.states, (3, 3)) < -1e-9)


def test_sampling_is_deterministic():
    cfg = SampleConfig("pure_haar", 2, "normal", 300, seed=9)
    a, b = sample_family(cfg), sample_family(cfg)
    assert np.array_equal(a.states, b.states) and a.attempts == b.attempts
    other = sample_family(SampleConfig("pure_haar", 2, "normal", 300, seed=10))
    assert not np.array_equal(a.states, other.states)


def test_chunk_streams_are_independent_of_order():
    x = chunk_rng(3, 1, 5).random(4)
    chunk_rng(3, 1, 4).random(100)
    assert np.array_equal(x, chunk_rng(3, 1, 5).random(4))


def test_config_validation():
    with pytest.raises(ValueError):
        SampleConfig("werner", 2)
    with pytest.raises(ValueError):
        SampleConfig("gbds", 4)
    with pytest.raises(ValueError):
        SampleConfig("gbds", 3, "loose")
    with pytest.raises(ValueError):
        SampleConfig("gbds", 3, target_count=0)


def test_jsonl_round_trip(tmp_path):
    cfg = SampleConfig("bds_uniform", 2, "normal", 5, seed=1)
    res = sample_family(cfg)
    path = tmp_path / "samples.jsonl"
    write_jsonl(path, cfg, res.states)
    cfg2, states = read_jsonl(path)
    assert cfg2 == cfg
    assert np.array_equal(np.stack([s.matrix for s in states]), res.states)
