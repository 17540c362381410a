import itertools

import numpy as np
import pytest

from distillery.stabilizer import (
    all_elements,
    canonic_encoding,
    canonical_generator,
    coset_of,
    generator_operator,
    generator_representatives,
    partition_epsilon,
    scale,
    stabilizer_projectors,
    symplectic_product,
    weyl_eigenbasis,
)
from distillery.weyl import error_operator, omega, weyl_operator


def test_symplectic_product_examples():
    assert symplectic_product((1, 0, 1, 0), (0, 1, 0, 1), 3) == 1
    assert symplectic_product((1, 0, 0, 0), (0, 1, 0, 0), 2) == 1


@pytest.mark.parametrize("d", [2, 3])
def test_symplectic_product_matches_commutation(d):
    # W(g) W(e) = omega^{<g,e>} W(e) W(g)
    rng = np.random.default_rng(d)
    elems = all_elements(d)
    for _ in range(50):
        g = elems[rng.integers(1, len(elems))]
        e = elems[rng.integers(len(elems))]
        wg, we = error_operator(d, g), error_operator(d, e)
        s = symplectic_product(g, e, d)
        assert np.allclose(wg @ we, omega(d) ** s * we @ wg)


def test_coset_of_example():
    c = coset_of((0, 1, 0, 1), (1, 0, 1, 0), 3)
    assert set(c.elements) == {(0, 1, 0, 1), (1, 1, 1, 1), (2, 1, 2, 1)}
    assert (1, 1, 1, 1) in c and len(c) == 3


def test_coset_of_zero_is_the_stabilizer():
    g = (1, 2, 0, 1)
    c = coset_of((0, 0, 0, 0), g, 3)
    assert set(c.elements) == {scale(i, g, 3) for i in range(3)}


def test_generator_counts():
    assert len(generator_representatives(2)) == 15
    assert len(generator_representatives(3)) == 40


def test_generators_are_projectively_distinct():
    d = 3
    reps = generator_representatives(d)
    assert len({canonical_generator(scale(2, g, d), d) for g in reps}) == len(reps)
    with pytest.raises(ValueError):
        canonical_generator((0, 0, 0, 0), d)


@pytest.mark.parametrize("d", [2, 3])
def test_partition_and_cosets_consistent(d):
    elems = all_elements(d)
    for g in generator_representatives(d):
        part = partition_epsilon(g, d)
        assert sum(len(v) for v in part.classes.values()) == d**4
        assert all(len(v) == d**3 for v in part.classes.values())
        for e in elems:
            c = coset_of(e, g, d)
            assert e in c
            # a coset sits inside one symplectic class
            assert {part.class_of(f) for f in c.elements} == {part.class_of(e)}


@pytest.mark.parametrize("d", [2, 3, 5])
def test_single_factor_eigenbasis(d):
    for a, b in itertools.product(range(d), repeat=2):
        lam, v = weyl_eigenbasis(d, a, b)
        w = weyl_operator(d, a, b)
        assert np.allclose(v.conj().T @ v, np.eye(d), atol=1e-12)
        assert np.allclose(w @ v, v * lam, atol=1e-12)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("conj", [False, True])
def test_encodings_unitary_with_eigen_codespaces(d, conj):
    for g in generator_representatives(d):
        enc = canonic_encoding(g, d, conj)
        u = enc.unitary
        assert np.max(np.abs(u.conj().T @ u - np.eye(d * d))) <= 1e-10
        w = generator_operator(g, d, conj)
        lams = set()
        for x in range(d):
            lam = enc.eigenvalue(x)
            lams.add(np.round(lam, 8))
            q = enc.codespace(x)
            assert q.shape == (d * d, d)
            assert np.max(np.abs(w @ q - lam * q)) <= 1e-10
        assert len(lams) == d


def test_example_encoding():
    enc = canonic_encoding((1, 0, 1, 0), 3)
    for x in range(3):
        for k in range(3):
            expected = np.zeros(9)
            expected[k * 3 + (x - k) % 3] = 1
            assert np.allclose(enc.codeword(x, k), expected)


@pytest.mark.parametrize("d", [2, 3])
def test_projectors_complete_and_orthogonal(d):
    for g in generator_representatives(d):
        proj = stabilizer_projectors(canonic_encoding(g, d))
        assert np.max(np.abs(sum(proj) - np.eye(d * d))) <= 1e-10
        for x, px in enumerate(proj):
            for y, py in enumerate(proj):
                target = px if x == y else np.zeros_like(px)
                assert np.max(np.abs(px @ py - target)) <= 1e-10


def test_example_projectors_are_diagonal():
    proj = stabilizer_projectors(canonic_encoding((1, 0, 1, 0), 3))
    for x, p in enumerate(proj):
        diag = np.array([1.0 if (k + m) % 3 == x else 0.0 for k in range(3) for m in range(3)])
        assert np.allclose(p, np.diag(diag))


def test_zero_generator_rejected():
    with pytest.raises(ValueError):
        canonic_encoding((0, 0, 0, 0), 3)
