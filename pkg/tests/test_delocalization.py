import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regdeloc import (
    brute_force_min_support,
    build_recipe,
    eigensystem,
    full_survey,
    generate_random_regular,
    min_support_size,
    recipe_for,
    spectral_split,
    theorem_bound,
    verify_inequality_chain,
)
from regdeloc.errors import BadExponent, MassBelowEpsilon, RecipeMismatch, SizeBudgetExceeded


def test_k4_eigensystem(k4):
    es = eigensystem(k4)
    assert np.allclose(es.values * math.sqrt(2), [-1, -1, -1, 3])
    assert [len(b) for b in es.eigenspaces()] == [3, 1]


def test_petersen_eigensystem(petersen):
    es = eigensystem(petersen)
    assert np.allclose(es.values * math.sqrt(2), [-2] * 4 + [1] * 5 + [3])
    assert es.tempered.tolist() == [True] * 9 + [False]
    assert es.orthonormality_error() <= 1e-8
    assert es.residuals().max() <= 1e-8
    top = es.vectors[:, -1]
    assert np.allclose(top, 1 / math.sqrt(10))


def test_eigensystem_is_reproducible(rrg60):
    a, b = eigensystem(rrg60), eigensystem(rrg60)
    assert np.array_equal(a.values, b.values) and np.array_equal(a.vectors, b.vectors)
    for j in range(60):
        col = a.vectors[:, j]
        assert col[np.flatnonzero(np.abs(col) > 1e-8)[0]] > 0


def test_eigensystem_budget(rrg60):
    with pytest.raises(SizeBudgetExceeded):
        eigensystem(rrg60, max_vertices=50)


@pytest.mark.parametrize("n,eps", [(10, 0.3), (60, 0.25), (12, 0.5)])
def test_min_support_constant(n, eps):
    size, E = min_support_size(np.full(n, 1 / math.sqrt(n)), eps)
    assert size == math.ceil(eps * n - 1e-9) and len(E) == size


def test_min_support_point_mass():
    phi = np.zeros(7)
    phi[4] = -1.0
    for eps in (0.1, 0.5, 1.0):
        size, E = min_support_size(phi, eps)
        assert size == 1 and E.tolist() == [4]


def test_min_support_ties_by_vertex_id():
    phi = np.full(4, 0.5)
    assert min_support_size(phi, 0.5)[1].tolist() == [0, 1]


def test_min_support_mass_below():
    with pytest.raises(MassBelowEpsilon):
        min_support_size(np.full(4, 0.1), 0.5)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=9), st.floats(0.05, 0.95))
def test_greedy_equals_exhaustive_random_vectors(vals, eps):
    phi = np.array(vals)
    if np.linalg.norm(phi) < 1e-3:
        return
    phi = phi / np.linalg.norm(phi)
    size, E = min_support_size(phi, eps)
    assert size == brute_force_min_support(phi, eps)
    mass = phi**2
    assert mass[E].sum() >= eps - 1e-12


def test_petersen_middle_eigenspace_support(petersen):
    es = eigensystem(petersen)
    for j in range(4, 9):
        size, _ = min_support_size(es.vectors[:, j], 0.5)
        assert 2 <= size <= 5
        assert size == brute_force_min_support(es.vectors[:, j], 0.5)


def test_spectral_split_properties(rrg60):
    es = eigensystem(rrg60)
    rng = np.random.default_rng(3)
    for _ in range(100):
        j = int(rng.integers(60))
        phi = es.vectors[:, j]
        E = rng.choice(60, size=int(rng.integers(1, 60)), replace=False)
        f = np.zeros(60)
        f[E] = phi[E]
        split = spectral_split(es, phi, f)
        assert split.reconstruction_error(f) <= 1e-8
        assert split.max_cross_product() <= 1e-8
        m = f @ f
        # ||g_temp||^2 <= m (1 - m) always, hence <= m (1 - eps) when m >= eps
        assert split.g_temp @ split.g_temp <= m * (1 - m) + 1e-10


def test_chain_full_set(petersen):
    es = eigensystem(petersen)
    for j in (0, 5, 9):
        rec = recipe_for(es.points[j], 0.4, 2)
        out = verify_inequality_chain(petersen, es, j, np.arange(10), rec)
        assert out.passed
        assert out.lhs == pytest.approx(out.h_measured)
        assert out.h_measured > 1 / 0.4
        assert out.h_measured == pytest.approx(out.h_analytic, rel=1e-9)


def test_chain_untempered_top(petersen):
    es = eigensystem(petersen)
    rec = recipe_for(es.points[9], 0.4, 2)
    assert rec.theta0 == 0.0
    out = verify_inequality_chain(petersen, es, 9, [0, 2, 4, 6, 8], rec)
    assert out.mass == pytest.approx(0.5)
    assert out.passed
    assert out.h_measured >= 2 * rec.M - 1 - 1e-8
    assert out.implied_E_bound <= 5


def test_chain_guards(petersen):
    es = eigensystem(petersen)
    rec = recipe_for(es.points[9], 0.4, 2)
    with pytest.raises(MassBelowEpsilon):
        verify_inequality_chain(petersen, es, 9, [0, 1], rec)
    with pytest.raises(RecipeMismatch):
        verify_inequality_chain(petersen, es, 9, np.arange(10), build_recipe(1.0, 0.4, 3000))


def test_chain_p_between_one_and_two(rrg60):
    es = eigensystem(rrg60)
    j = 20
    size, E = min_support_size(es.vectors[:, j], 0.5)
    out = verify_inequality_chain(rrg60, es, j, E, recipe_for(es.points[j], 0.5, 2), p=1.5)
    assert out.passed
    assert out.upper == pytest.approx(out.norm_K * size ** (1 / 3))


def test_theorem_bound_examples():
    assert theorem_bound(0.5, 0.5, 1, 10, 2)[0] == 1 / 1024
    assert theorem_bound(1.0, 0.5, 1, 10, 2)[0] == 1 / 256
    assert theorem_bound(1.0, 0.5, 1, 256, 3)[1] == pytest.approx(3.0)
    assert theorem_bound(0.5, 0.5, 1, 0, 2)[1] == 1.0
    for p in (2.0, 0.9, 2.5):
        with pytest.raises(BadExponent):
            theorem_bound(0.5, 0.5, p, 10, 2)
    with pytest.raises(ValueError):
        theorem_bound(0.0, 0.5, 1, 10, 2)


def test_survey_petersen(petersen):
    rep = full_survey(petersen, 0.3, rotations=3)
    doc = rep.to_dict()
    assert len(rep.rows) == 10 and rep.all_pass
    assert doc["schema"] == 1
    assert doc["parameters"]["N"] == 2 and doc["parameters"]["provenance"] == "tree_regime"
    assert rep.rotation_checks == {"total": 6, "passed": 6, "per_eigenspace": 3}
    assert rep.bound_vacuous and any("vacuous" in n for n in rep.notes)
    for row in rep.rows:
        assert row["E_min"] >= 1 and row["lhs"] >= 0.09 - 1e-8


def test_survey_n_zero_is_vacuous(k4):
    rep = full_survey(k4, 0.5, N=0)
    assert rep.bound == 1.0 and rep.bound_vacuous and rep.all_pass


def test_survey_csv_columns(petersen):
    rep = full_survey(petersen, 0.5)
    rows = list(rep.csv_rows())
    assert list(rows[0]) == ["j", "lambda", "tempered", "mass_target", "E_min", "delta",
                             "bound", "lhs5", "rhs5", "lhs8", "pass"]


def test_survey_threads_do_not_change_result():
    g = generate_random_regular(80, 2, seed=9)
    a = full_survey(g, 0.4, workers=1).to_dict()
    b = full_survey(g, 0.4, workers=4).to_dict()
    assert a == b


def test_survey_free_fit():
    g = generate_random_regular(300, 2, seed=3)
    rep = full_survey(g, 0.5, fit="free")
    assert rep.parameters["provenance"] == "free_fit"
    assert rep.all_pass
    assert rep.empirical_min_E >= 1
