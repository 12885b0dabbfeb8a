import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regdeloc import (
    RadialKernel,
    SpectralPoint,
    chebyshev_first,
    chebyshev_first_coefficients,
    chebyshev_second,
    lemma1_kernel,
    lemma1_kernel_value,
    lemma1_oracle,
    plancherel_density,
    plancherel_integral,
    plancherel_moment,
    spherical_function,
    spherical_transform,
    truncated_tree,
)
from regdeloc.errors import DepthTooSmall, NOddError


def test_spectral_point_tempered():
    p = SpectralPoint.from_lambda(2 * math.cos(0.7))
    assert p.tempered and math.isclose(p.theta, 0.7)
    q = SpectralPoint.from_theta(0.7)
    assert math.isclose(q.lam, p.lam)


def test_spectral_point_untempered_and_clamp():
    top = 3 / math.sqrt(2)
    p = SpectralPoint.from_lambda(top, d=2)
    assert not p.tempered and p.sign == 1
    assert math.isclose(2 * math.cosh(p.theta), top)
    edge = SpectralPoint.from_lambda(-2.0 - 1e-13)
    assert edge.tempered and edge.theta == math.pi
    with pytest.raises(ValueError):
        SpectralPoint.from_lambda(3.0, d=2)


@settings(max_examples=50)
@given(st.integers(0, 15), st.floats(0, math.pi))
def test_chebyshev_cosine_identities(n, theta):
    assert math.isclose(chebyshev_first(n, math.cos(theta)), math.cos(n * theta), abs_tol=1e-12)
    lhs = chebyshev_second(n, math.cos(theta)) * math.sin(theta)
    assert math.isclose(lhs, math.sin((n + 1) * theta), abs_tol=1e-11)


def test_chebyshev_coefficients():
    assert chebyshev_first_coefficients(4) == [1, 0, -8, 0, 8]
    x = 0.3
    assert math.isclose(np.polyval(chebyshev_first_coefficients(7)[::-1], x), chebyshev_first(7, x))


def test_chebyshev_second_at_edges():
    assert chebyshev_second(6, 1.0) == 7
    assert chebyshev_second(5, -1.0) == -6


def test_spherical_function_frozen():
    # dist 2 at lam = 2: d^{-1}(2/3 P_2(1) + 1/3 Q_2(1)) = (2/3 + 1)/2
    assert math.isclose(spherical_function(2, 2.0, 2), 5 / 6)
    assert spherical_function(3, 0.4, 0) == 1.0


@pytest.mark.parametrize("d", [2, 3, 4])
def test_spherical_function_is_eigenfunction(d):
    for lam in (0.3, -1.7, 2.0, (d + 1) / math.sqrt(d)):
        phi = [spherical_function(d, lam, n) for n in range(10)]
        # root: (d+1) phi(1) / sqrt d = lam phi(0)
        assert math.isclose((d + 1) * phi[1] / math.sqrt(d), lam * phi[0], abs_tol=1e-12)
        for n in range(1, 9):
            rhs = (phi[n - 1] + d * phi[n + 1]) / math.sqrt(d)
            assert math.isclose(rhs, lam * phi[n], abs_tol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_spherical_function_top_is_one(d):
    top = (d + 1) / math.sqrt(d)
    assert np.allclose(spherical_function(d, top, np.arange(8)), 1.0)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_plancherel_density_matches_cosine_series(d):
    theta = np.linspace(0.01, math.pi - 0.01, 17)
    series = np.ones_like(theta)
    for n in range(1, 200):
        series += (1 - d) / d**n * np.cos(2 * n * theta)
    assert np.allclose(plancherel_density(d, theta), series / math.pi, atol=1e-12)


def test_plancherel_moment_exact():
    assert plancherel_moment(2, 3, exact=True) == Fraction(-1, 16)
    assert plancherel_moment(4, 0) == 1.0


@pytest.mark.parametrize("d", [2, 3])
def test_plancherel_mass_one(d):
    assert math.isclose(plancherel_integral(d, np.ones_like), 1.0, abs_tol=1e-12)


def test_lemma1_values_frozen():
    assert [lemma1_kernel_value(2, 2, k) for k in range(3)] == [-0.25, 0.0, 0.25]
    assert lemma1_kernel_value(3, 4, 2, exact=True) == Fraction(-2, 18)
    assert lemma1_kernel_value(3, 4, 5) == 0.0
    with pytest.raises(NOddError):
        lemma1_kernel_value(2, 3, 0)


@pytest.mark.parametrize("d,n", [(2, 2), (2, 6), (3, 4), (4, 4)])
def test_lemma1_tree_and_quotient_oracles_agree(d, n):
    tree = lemma1_oracle(d, n, n + 2, method="tree")
    quo = lemma1_oracle(d, n, n + 2, method="quotient")
    for k in range(n + 3):
        assert quo[k] == lemma1_kernel_value(d, n, k, exact=True)
        assert abs(tree[k] - float(quo[k])) < 1e-12


def test_lemma1_oracle_depth_guard():
    with pytest.raises(DepthTooSmall):
        lemma1_oracle(2, 4, 4)


def test_truncated_tree_shape():
    A, levels = truncated_tree(2, 3)
    assert A.shape == (22, 22)
    assert np.bincount(levels).tolist() == [1, 3, 6, 12]
    deg = np.asarray(A.sum(axis=1)).ravel()
    assert np.all(deg[levels < 3] == 3) and np.all(deg[levels == 3] == 1)


@pytest.mark.parametrize("d,n", [(2, 4), (3, 6)])
def test_lemma1_kernel_transform_is_cosine(d, n):
    kern = lemma1_kernel(d, n)
    thetas = np.linspace(0, math.pi, 9)
    for t in thetas:
        assert math.isclose(spherical_transform(kern, 2 * math.cos(t)), math.cos(n * t), abs_tol=1e-12)
    assert kern.consistency_error(thetas) < 1e-12


def test_transform_of_unit_sphere_kernel():
    # k = indicator of distance 1: h = (d+1) phi(1) = sqrt(d) lam
    kern = RadialKernel(2, (0.0, 1.0))
    for lam in (-1.0, 0.5, 2.0):
        assert math.isclose(kern.transform(lam), math.sqrt(2) * lam)


def test_radial_kernel_json_round_trip():
    kern = lemma1_kernel(3, 4)
    back = RadialKernel.from_json(kern.to_json())
    assert back == kern and back.support_radius == 4
    with pytest.raises(ValueError):
        RadialKernel(2, (1.0,)).series_transform(0.3)


def test_spherical_function_vectorised_in_lambda():
    lams = np.array([-1.5, 0.2, 2.0, 2.1])
    vec = spherical_function(2, lams, 3)
    assert np.allclose(vec, [spherical_function(2, float(v), 3) for v in lams])
