"""Cyclic stabilizers of the two-copy Weyl error group.

A stabilizer is generated by a single error element ``g = (a1, b1, a2, b2)``
(phase/shift pairs for the two copies). Error elements are 4-tuples
``(k1, l1, k2, l2)`` with arithmetic mod d.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .weyl import check_prime, error_operator, error_pos, omega

Element = tuple[int, int, int, int]


def add(e: Element, f: Element, d: int) -> Element:
    return tuple((x + y) % d for x, y in zip(e, f))


def scale(c: int, e: Element, d: int) -> Element:
    return tuple((c * x) % d for x in e)


def all_elements(d: int) -> list[Element]:
    """All d**4 error elements, in :func:`distillery.weyl.error_pos` order."""
    # error_pos orders by (l1, k1, l2, k2)
    return [(k1, l1, k2, l2) for l1, k1, l2, k2 in itertools.product(range(d), repeat=4)]


def symplectic_product(g: Element, e: Element, d: int) -> int:
    """``<g, e> = sum_n b_n k_n - a_n l_n  (mod d)``."""
    a1, b1, a2, b2 = g
    k1, l1, k2, l2 = e
    return (b1 * k1 - a1 * l1 + b2 * k2 - a2 * l2) % d


def canonical_generator(g: Element, d: int) -> Element:
    """Projective representative of ``g``: first nonzero component scaled to 1."""
    g = tuple(x % d for x in g)
    lead = next((x for x in g if x), None)
    if lead is None:
        raise ValueError("the zero element does not generate a stabilizer")
    return scale(pow(lead, -1, d), g, d)


@lru_cache(maxsize=None)
def generator_representatives(d: int) -> tuple[Element, ...]:
    """One generator per cyclic stabilizer, in element order.

    There are ``(d**4 - 1) / (d - 1)`` of them. Like error elements they are
    ordered by flat position, i.e. lexicographically in ``(l1, k1, l2, k2)``.
    """
    check_prime(d)
    reps = {canonical_generator(g, d) for g in itertools.product(range(d), repeat=4) if any(g)}
    return tuple(sorted(reps, key=lambda g: error_pos(g, d)))


@dataclass(frozen=True)
class Coset:
    """Coset ``{e, e+g, ..., e+(d-1)g}``, stored from its first element in flat order."""

    generator: Element
    elements: tuple[Element, ...]

    @property
    def representative(self) -> Element:
        return self.elements[0]

    def __contains__(self, e) -> bool:
        return tuple(e) in self.elements

    def __len__(self) -> int:
        return len(self.elements)


def coset_of(e: Element, g: Element, d: int) -> Coset:
    members = [add(tuple(e), scale(i, g, d), d) for i in range(d)]
    rep = min(members, key=lambda x: error_pos(x, d))
    return Coset(tuple(g), tuple(add(rep, scale(i, g, d), d) for i in range(d)))


@dataclass(frozen=True)
class SymplecticPartition:
    generator: Element
    classes: dict

    def class_of(self, e: Element) -> int:
        for s, members in self.classes.items():
            if tuple(e) in members:
                return s
        raise KeyError(e)


def partition_epsilon(g: Element, d: int) -> SymplecticPartition:
    """Split all error elements by their symplectic product with ``g``."""
    classes = {s: set() for s in range(d)}
    for e in all_elements(d):
        classes[symplectic_product(g, e, d)].add(e)
    return SymplecticPartition(tuple(g), {s: frozenset(v) for s, v in classes.items()})


# -- encodings ---------------------------------------------------------------


def _phase_angle(z: complex) -> float:
    return float(np.angle(z)) % (2 * np.pi)


def weyl_eigenbasis(d: int, a: int, b: int) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigenvectors of ``W_{a,b}``, ordered by eigenvalue phase.

    Returns ``(eigenvalues, vectors)`` with eigenvector ``i`` in column ``i``.
    For the identity the computational basis is returned in order.
    """
    a, b = a % d, b % d
    if b == 0:
        lam = np.array([omega(d) ** ((a * j) % d) for j in range(d)])
        vecs = np.eye(d, dtype=complex)
    else:
        ab = a * b
        m = np.arange(d)
        lam = np.exp(2j * np.pi * (ab * (d - 1) / 2 + np.arange(d)) / d)
        quad = np.exp(-2j * np.pi * ab * (m * (m - 1) // 2) / d)
        vecs = np.zeros((d, d), dtype=complex)
        rows = (m * b) % d
        for t in range(d):
            vecs[rows, t] = lam[t] ** m * quad / np.sqrt(d)
    # stable sort so that degenerate (identity) labels keep computational order
    order = sorted(range(d), key=lambda i: round(_phase_angle(lam[i]), 12))
    return lam[order], vecs[:, order]


@dataclass(frozen=True, eq=False)
class Encoding:
    """Canonic encoding ``|x>|k> -> |u_{x,k}>`` for one generator.

    Column ``x*d + k`` of ``unitary`` is the codeword ``u_{x,k}``; it lies in
    the eigenspace of ``W(g)`` (of ``W(g)*`` when ``conjugated``) with
    eigenvalue ``eigenvalue(x)``.
    """

    d: int
    generator: Element
    unitary: np.ndarray
    conjugated: bool
    reference: complex

    def eigenvalue(self, x: int) -> complex:
        lam = self.reference * omega(self.d) ** (x % self.d)
        return np.conj(lam) if self.conjugated else lam

    def codeword(self, x: int, k: int) -> np.ndarray:
        return self.unitary[:, (x % self.d) * self.d + (k % self.d)]

    def codespace(self, x: int) -> np.ndarray:
        d = self.d
        return self.unitary[:, (x % d) * d:(x % d + 1) * d]


@lru_cache(maxsize=None)
def canonic_encoding(g: Element, d: int, conjugated: bool = False) -> Encoding:
    """Encoding built from product eigenvectors of ``W_{a1,b1} (x) W_{a2,b2}``.

    Product vectors are enumerated lexicographically in the single-factor
    labels, grouped by eigenvalue ``lambda_0 * omega**x`` where ``lambda_0``
    belongs to the first product vector, and numbered ``k`` within each
    group in enumeration order.
    """
    d = check_prime(d)
    g = tuple(int(x) % d for x in g)
    if not any(g):
        raise ValueError("the zero element does not generate a stabilizer")
    lam1, v1 = weyl_eigenbasis(d, g[0], g[1])
    lam2, v2 = weyl_eigenbasis(d, g[2], g[3])
    ref = lam1[0] * lam2[0]
    groups: list[list[np.ndarray]] = [[] for _ in range(d)]
    for i in range(d):
        for j in range(d):
            rel = lam1[i] * lam2[j] / ref
            x = int(round(_phase_angle(rel) * d / (2 * np.pi))) % d
            groups[x].append(np.kron(v1[:, i], v2[:, j]))
    if any(len(grp) != d for grp in groups):
        raise RuntimeError(f"generator {g} does not split into {d} codespaces of dimension {d}")
    u = np.column_stack([vec for grp in groups for vec in grp])
    if conjugated:
        u = u.conj()
    u.setflags(write=False)
    return Encoding(d, g, u, conjugated, complex(ref))


def generator_operator(g: Element, d: int, conjugated: bool = False) -> np.ndarray:
    w = error_operator(d, g)
    return w.conj() if conjugated else w


def stabilizer_projectors(enc: Encoding) -> list[np.ndarray]:
    """Projectors ``P(x) = sum_k |u_{x,k}><u_{x,k}|`` for x = 0..d-1."""
    out = []
    for x in range(enc.d):
        q = enc.codespace(x)
        out.append(q @ q.conj().T)
    return out
