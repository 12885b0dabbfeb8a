import math

import numpy as np
import pytest

from regdeloc import (
    apply_chebyshev_of_t,
    build_sphere_family,
    build_t_operator,
    certify,
    chebyshev_matrix_of_t,
    chebyshev_series_of_t,
    corollary1_constant,
    corollary1_decomposition_check,
    fit_condition,
    generate_random_regular,
    girth_report,
    matrix_norm,
    sphere_norm,
    truncated_tree,
)
from regdeloc.errors import NOddError, UnsupportedExponent


def test_k4_t_spectrum(k4):
    ev = np.linalg.eigvalsh(build_t_operator(k4)) * math.sqrt(2)
    assert np.allclose(ev, [-1, -1, -1, 3])


def test_petersen_t_spectrum(petersen):
    ev = np.linalg.eigvalsh(build_t_operator(petersen)) * math.sqrt(2)
    assert np.allclose(ev, [-2] * 4 + [1] * 5 + [3])


def test_t_norm_bound(rrg60):
    T = build_t_operator(rrg60)
    assert np.abs(np.linalg.eigvalsh(T)).max() <= 3 / math.sqrt(2) + 1e-12
    assert np.allclose(T, build_t_operator(rrg60, sparse=True).toarray())


def test_s2_identity(petersen):
    fam = build_sphere_family(petersen, 3)
    T = build_t_operator(petersen)
    assert np.allclose(fam[2], T @ T - 1.5 * np.eye(10))


def test_walk_counts_non_backtracking(petersen):
    # Petersen: girth 5, so A_2 and A_3 count paths of length 2 and 3
    fam = build_sphere_family(petersen, 3)
    A2 = fam.walk_counts[2]
    assert np.all(A2.sum(axis=1) == 6)
    assert np.all(np.diag(A2) == 0)


def test_tree_row_sums():
    A, levels = truncated_tree(2, 6)
    n = A.shape[0]
    counts = [np.eye(n), A.toarray()]
    counts.append(A @ counts[1] - 3 * counts[0])
    for m in range(2, 4):
        counts.append(A @ counts[m] - 2 * counts[m - 1])
    interior = levels <= 2
    for m in range(1, 5):
        assert np.all(counts[m][interior].sum(axis=1) == 3 * 2 ** (m - 1))


def test_chebyshev_sweep_matches_dense(rrg60):
    T = build_t_operator(rrg60)
    v = np.random.default_rng(0).standard_normal(60)
    prev, cur = np.eye(60), T / 2
    for _ in range(5):
        prev, cur = cur, T @ cur - prev
    assert np.allclose(apply_chebyshev_of_t(rrg60, 6, v), cur @ v)
    assert np.allclose(chebyshev_matrix_of_t(rrg60, 6), cur)


def test_chebyshev_series_linear(rrg60):
    v = np.random.default_rng(1).standard_normal((60, 2))
    coeffs = [0.5, 0.0, -1.0, 2.0]
    expect = sum(c * apply_chebyshev_of_t(rrg60, m, v) for m, c in enumerate(coeffs))
    assert np.allclose(chebyshev_series_of_t(rrg60, coeffs, v), expect)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_corollary1_small_graphs(k4, petersen, k33, n):
    for g in (k4, petersen, k33):
        assert corollary1_decomposition_check(g, n) <= 1e-10


def test_corollary1_odd_rejected(k4):
    with pytest.raises(NOddError):
        corollary1_decomposition_check(k4, 3)


def test_corollary1_constant_examples():
    # alpha = 1/2: every term is d, so c = d (n/2 + 1)
    assert corollary1_constant(2, 0.5, 6) == 8
    assert corollary1_constant(3, 0.0, 2) == pytest.approx(3 * (1 + 1 / 3))


def test_corollary1_constant_bounds_norm(petersen):
    fam = build_sphere_family(petersen, 8)
    fit = certify(fam, 0.25)
    for n in range(2, 9, 2):
        P = chebyshev_matrix_of_t(petersen, n)
        bound = corollary1_constant(2, fit.alpha, n) * fit.C * 2 ** (-fit.alpha * n)
        assert matrix_norm(P, 1).value <= bound + 1e-12


def test_matrix_norm_cases():
    M = np.array([[2.0, -3.0], [-3.0, 1.0]])
    assert matrix_norm(M, 1).value == 3.0 and matrix_norm(M, 1).q == math.inf
    two = np.abs(np.linalg.eigvalsh(M)).max()
    assert matrix_norm(M, 2).value == pytest.approx(two)
    mid = matrix_norm(M, 1.5)
    assert not mid.exact and mid.q == pytest.approx(3.0)
    assert mid.value == pytest.approx(3.0 ** (1 / 3) * two ** (2 / 3))
    with pytest.raises(UnsupportedExponent):
        matrix_norm(M, 2.5)


def test_tree_regime_norms(petersen):
    fam = build_sphere_family(petersen, 4)
    R = girth_report(petersen).injectivity_radius
    for n in range(R + 1):
        assert sphere_norm(fam, n).value == 2 ** (-n / 2)


def test_fit_condition_tree_regime(k4, petersen, k33):
    expect = {"K4": 1, "Petersen": 2, "K3,3": 1}
    for g in (k4, petersen, k33):
        fit = fit_condition(build_sphere_family(g, 6), C=1.0, alpha=0.5)
        assert fit.N == expect[g.name]
        assert fit.N >= girth_report(g).injectivity_radius


def test_fit_condition_free_and_serialise():
    g = generate_random_regular(300, 2, seed=3)
    fit = fit_condition(build_sphere_family(g, 12))
    assert 0 < fit.alpha <= 0.5 and fit.N >= 2
    for m in range(1, fit.N + 1):
        assert fit.per_n_norms[m] <= fit.bound(m) * (1 + 1e-12)
    d = fit.to_dict()
    assert set(d) == {"p", "per_n_norms", "C", "alpha", "N", "exact", "flags"}


def test_fit_condition_no_decay(k4):
    fit = fit_condition(build_sphere_family(k4, 1))
    assert fit.N == 0 and "no_decay" in fit.flags


def test_certify_always_holds(rrg60):
    fam = build_sphere_family(rrg60, 8)
    fit = certify(fam, 0.3)
    assert fit.N == 8
    assert all(fit.per_n_norms[m] <= fit.bound(m) * (1 + 1e-12) for m in range(1, 9))
