"""Symmetric-function layer: oracles are brute-force subset enumeration
and numpy's eigensolver."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import positive_definite, random_symmetric
from warpcurv import symfun


def esym_enumerated(kappas, k):
    """Brute-force elementary symmetric function (the oracle)."""
    if k == 0:
        return 1.0
    return sum(math.prod(c) for c in itertools.combinations(kappas, k))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_elementary_symmetric_against_enumeration(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(20):
        kappas = rng.normal(size=n)
        pack = symfun.elementary_symmetric(kappas)
        for k in range(n + 1):
            expect = esym_enumerated(kappas, k)
            scale = max(1.0, abs(expect))
            assert abs(pack.S[k] - expect) <= 1e-12 * scale
            assert abs(pack.H[k] - expect / math.comb(n, k)) <= 1e-12 * scale


def test_charpoly_cross_check():
    # prod(x - kappa_i) = sum_k (-1)^k S_k x^(n-k)
    rng = np.random.default_rng(7)
    kappas = rng.normal(size=5)
    pack = symfun.elementary_symmetric(kappas)
    coeffs = np.poly(kappas)
    for k in range(6):
        assert abs(coeffs[k] - (-1.0) ** k * pack.S[k]) <= 1e-12 * max(
            1.0, abs(pack.S[k]))


@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=2 ** 31 - 1))
@settings(max_examples=60, deadline=None)
def test_jacobi_matches_numpy(n, seed):
    rng = np.random.default_rng(seed)
    A = random_symmetric(rng, n)
    ours = symfun.jacobi_eigenvalues(A)
    ref = np.linalg.eigvalsh(A)
    assert np.max(np.abs(ours - ref)) <= 1e-10 * max(1.0, np.max(np.abs(ref)))


def test_jacobi_vectors_diagonalize():
    rng = np.random.default_rng(3)
    A = random_symmetric(rng, 5)
    vals, vecs = symfun.jacobi_eigenvalues(A, return_vectors=True)
    for i in range(5):
        resid = A @ vecs[:, i] - vals[i] * vecs[:, i]
        assert np.max(np.abs(resid)) <= 1e-10


def test_orthogonal_invariance():
    rng = np.random.default_rng(11)
    A = random_symmetric(rng, 4)
    Q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    B = Q.T @ A @ Q
    fa = symfun.newton_family(A)
    fb = symfun.newton_family(B)
    assert np.allclose(fa.pack.S, fb.pack.S, atol=1e-11)
    # Newton tensors transform covariantly
    for k in range(4):
        assert np.max(np.abs(Q.T @ fa.P[k] @ Q - fb.P[k])) <= 1e-10


def test_orientation_flip_parity():
    rng = np.random.default_rng(13)
    A = random_symmetric(rng, 5)
    sp = symfun.elementary_symmetric(symfun.jacobi_eigenvalues(A))
    sm = symfun.elementary_symmetric(symfun.jacobi_eigenvalues(-A))
    for k in range(6):
        assert abs(sm.S[k] - (-1.0) ** k * sp.S[k]) <= 1e-11 * max(
            1.0, abs(sp.S[k]))


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_trace_identities(n):
    rng = np.random.default_rng(200 + n)
    for _ in range(10):
        report = symfun.trace_and_norm_identities(random_symmetric(rng, n))
        assert report["passed"], report


def test_newton_recursion_terminates():
    # Cayley-Hamilton: S_n I - A P_{n-1} = 0
    rng = np.random.default_rng(17)
    A = random_symmetric(rng, 4)
    fam = symfun.newton_family(A)
    top = fam.pack.S[4] * np.eye(4) - A @ fam.P[3]
    assert np.max(np.abs(top)) <= 1e-11 * max(1.0, abs(fam.pack.S[4]))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_bk_telescope_vanishes(k):
    rng = np.random.default_rng(300 + k)
    for n in (k + 1, 6):
        val = symfun.bk_telescope(random_symmetric(rng, n), k)
        assert abs(val) <= 1e-10


def test_garding_chain_on_definite_matrix():
    rng = np.random.default_rng(23)
    A = positive_definite(rng, 5)
    pack = symfun.elementary_symmetric(symfun.jacobi_eigenvalues(A))
    rep = symfun.garding_chain(pack, 5)
    assert rep.applicable and rep.holds
    assert all(m >= -1e-12 for m in rep.margins)
    assert not rep.umbilical


def test_garding_equality_iff_umbilical():
    pack = symfun.elementary_symmetric(np.full(4, 1.7))
    rep = symfun.garding_chain(pack, 4)
    assert rep.holds and rep.umbilical


def test_garding_not_applicable_for_nonpositive_h1():
    pack = symfun.elementary_symmetric(np.array([-1.0, -2.0, 0.5]))
    rep = symfun.garding_chain(pack, 2)
    assert not rep.applicable


def test_p1_ellipticity_from_h2():
    rng = np.random.default_rng(29)
    A = positive_definite(rng, 4)
    rep = symfun.p1_ellipticity_check(A)
    assert rep.applicable and rep.positive
    assert rep.min_margin > 0


def test_batch_matches_scalar():
    rng = np.random.default_rng(31)
    kappas = rng.normal(size=(7, 4))
    S = symfun.elementary_symmetric_batch(kappas)
    H = symfun.h_from_s(S)
    for i in range(7):
        pack = symfun.elementary_symmetric(kappas[i])
        assert np.max(np.abs(S[i] - pack.S)) <= 1e-12
        assert np.max(np.abs(H[i] - pack.H)) <= 1e-12


def test_newton_batch_matches_scalar():
    rng = np.random.default_rng(37)
    A = np.stack([random_symmetric(rng, 3) for _ in range(5)])
    kappas = np.linalg.eigvalsh(A)
    S = symfun.elementary_symmetric_batch(kappas)
    P = symfun.newton_family_batch(A, S)
    for i in range(5):
        fam = symfun.newton_family(A[i])
        for k in range(3):
            assert np.max(np.abs(P[i, k] - fam.P[k])) <= 1e-10


def test_dimension_guard():
    with pytest.raises(ValueError):
        symfun.elementary_symmetric(np.zeros(symfun.MAX_DIM + 1))


@given(st.integers(min_value=2, max_value=6),
       st.integers(min_value=0, max_value=2 ** 31 - 1))
@settings(max_examples=40, deadline=None)
def test_spectrum_roundtrip(n, seed):
    # eigenvalues of P_k are the partial elementary symmetric sums:
    # for A = diag(kappas), P_k has diagonal S_k(kappas without i)
    rng = np.random.default_rng(seed)
    kappas = rng.normal(size=n)
    fam = symfun.newton_family(np.diag(kappas))
    for k in range(n):
        for i in range(n):
            others = np.delete(kappas, i)
            expect = esym_enumerated(others, k)
            assert abs(fam.P[k][i, i] - expect) <= 1e-9 * max(1.0, abs(expect))
