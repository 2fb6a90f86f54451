"""Evaluation and differentiation of homogeneous maps."""

import numpy as np
import pytest

from hominv import (
    BlackBox,
    InvalidInputError,
    InvalidParameterError,
    MapSpec,
    PolyMap,
    UndefinedAtOriginError,
    blackbox_of,
    complex_square_map,
    diag_map,
    eval_jacobian,
    eval_jacobian_batch,
    eval_map,
    extend_at_origin,
    homogeneity_residual,
    identity_map,
    perturbed_radial_blackbox,
    radial_cube_map,
    radial_linear_map,
    random_admissible_map,
)


def test_polymap_merges_duplicate_monomials():
    p = PolyMap(2, [[(1.0, (2, 0)), (2.0, (2, 0))], [(1.0, (1, 1))]])
    assert p.components[0] == ((3.0, (2, 0)),)


def test_polymap_drops_zero_coefficients():
    p = PolyMap(2, [[(0.0, (2, 0)), (1.0, (0, 2))], [(1.0, (1, 1))]])
    assert p.components[0] == ((1.0, (0, 2)),)


def test_polymap_orders_monomials_graded_lex_descending():
    p = PolyMap(2, [[(1.0, (0, 2)), (2.0, (1, 1)), (3.0, (2, 0))], []])
    assert [e for _, e in p.components[0]] == [(2, 0), (1, 1), (0, 2)]


def test_polymap_degree_is_max_total_degree():
    p = PolyMap(2, [[(1.0, (2, 0))], [(1.0, (1, 0))]])
    assert p.degree == 2


def test_zero_polymap_degree_convention():
    p = PolyMap(3, [[], [], []])
    assert p.degree == 1


def test_polymap_rejects_negative_exponents():
    with pytest.raises((InvalidParameterError, InvalidInputError)):
        PolyMap(2, [[(1.0, (-1, 2))], []])


def test_mapspec_kappa_defaults_to_degree():
    m = radial_cube_map(3)
    assert m.kappa == 3.0
    assert m.radial_exponent == 0.0


def test_mapspec_radial_weight_exponent():
    m = radial_linear_map((1.0, 2.0, 3.0), kappa=2.0)
    assert m.kappa == 2.0
    assert m.radial_exponent == pytest.approx(1.0)


def test_mapspec_rejects_nonpositive_kappa():
    with pytest.raises(InvalidParameterError):
        MapSpec(PolyMap(3, [[(1.0, (1, 0, 0))], [], []]), kappa=0.0)
    with pytest.raises(InvalidParameterError):
        MapSpec(PolyMap(3, [[(1.0, (1, 0, 0))], [], []]), kappa=-2.0)


def test_blackbox_requires_dimension():
    bb = BlackBox(eval=lambda x: np.asarray(x), declared_kappa=1.0)
    with pytest.raises(InvalidParameterError):
        MapSpec(bb)
    m = MapSpec(bb, n=3)
    assert m.n == 3 and not m.is_poly


def test_eval_identity():
    m = identity_map(3)
    x = np.array([1.0, -2.0, 0.5])
    assert np.allclose(eval_map(m, x), x)


def test_eval_complex_square_known_value():
    # (x, y) = (1, 2): (1 - 4, 2*1*2) = (-3, 4)
    m = complex_square_map()
    assert np.allclose(eval_map(m, np.array([1.0, 2.0])), [-3.0, 4.0])


def test_eval_radial_cube_on_axis():
    m = radial_cube_map(3)
    assert np.allclose(eval_map(m, np.array([2.0, 0.0, 0.0])), [8.0, 0.0, 0.0])


def test_eval_at_origin_is_zero():
    for m in (radial_cube_map(3), radial_linear_map((1.0, 2.0, 3.0), kappa=2.0),
              complex_square_map()):
        assert np.allclose(eval_map(m, np.zeros(m.n)), 0.0)


def test_extend_at_origin_is_zero_vector():
    m = radial_cube_map(3)
    assert np.array_equal(extend_at_origin(m), np.zeros(3))


def test_eval_batch_matches_single():
    m = random_admissible_map(n=4, seed=7)
    rng = np.random.default_rng(3)
    X = rng.standard_normal((17, 4))
    batch = eval_map(m, X)
    for i in range(17):
        assert np.allclose(batch[i], eval_map(m, X[i]), rtol=1e-14, atol=1e-14)


def test_eval_rejects_nonfinite_input():
    m = identity_map(3)
    with pytest.raises(InvalidInputError):
        eval_map(m, np.array([1.0, np.nan, 0.0]))
    with pytest.raises(InvalidInputError):
        eval_map(m, np.array([np.inf, 0.0, 0.0]))


def test_eval_rejects_wrong_length():
    m = identity_map(3)
    with pytest.raises(InvalidInputError):
        eval_map(m, np.array([1.0, 2.0]))


def test_blackbox_bad_output_shape_rejected():
    bb = MapSpec(BlackBox(eval=lambda x: np.zeros(2), declared_kappa=1.0), n=3)
    with pytest.raises(InvalidInputError):
        eval_map(bb, np.ones(3))


def test_jacobian_identity():
    m = identity_map(3)
    J = eval_jacobian(m, np.array([0.3, -0.4, 1.0]))
    assert np.allclose(J.entries, np.eye(3))
    assert J.det == pytest.approx(1.0)


def test_jacobian_complex_square_closed_form():
    # Df(x, y) = [[2x, -2y], [2y, 2x]], det = 4(x^2 + y^2)
    m = complex_square_map()
    x, y = 0.7, -1.3
    J = eval_jacobian(m, np.array([x, y]))
    assert np.allclose(J.entries, [[2 * x, -2 * y], [2 * y, 2 * x]])
    assert J.det == pytest.approx(4 * (x * x + y * y))


def test_jacobian_radial_cube_determinant_closed_form():
    # Df = |xi|^2 I + 2 xi xi^T has eigenvalues |xi|^2 (twice) and 3|xi|^2,
    # so det = 3 |xi|^6 in dimension 3.
    m = radial_cube_map(3)
    xi = np.array([1.0, 2.0, 3.0])
    d = eval_jacobian(m, xi).det
    assert d == pytest.approx(3.0 * 14.0**3, rel=1e-12)


def test_jacobian_at_origin_errors():
    for m in (radial_cube_map(3), radial_linear_map((1.0, 2.0, 3.0), kappa=2.0),
              blackbox_of(identity_map(3))):
        with pytest.raises(UndefinedAtOriginError):
            eval_jacobian(m, np.zeros(m.n))


def test_jacobian_batch_rejects_origin_row():
    m = radial_cube_map(3)
    X = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    with pytest.raises(UndefinedAtOriginError):
        eval_jacobian_batch(m, X)


@pytest.mark.parametrize("maker", [
    lambda: radial_cube_map(3),
    lambda: radial_linear_map((1.0, 2.0, 3.0), kappa=2.0),
    lambda: random_admissible_map(n=4, seed=7, kappa=3.5),
    lambda: complex_square_map(),
])
def test_jacobian_homogeneity_order_kappa_minus_one(maker):
    # Df(tau xi) = tau^(kappa-1) Df(xi), checked entrywise to 1e-9 relative
    m = maker()
    rng = np.random.default_rng(11)
    for _ in range(8):
        xi = rng.standard_normal(m.n)
        xi /= np.linalg.norm(xi)
        tau = 10.0 ** rng.uniform(-2, 2)
        J1 = eval_jacobian(m, tau * xi).entries
        J0 = eval_jacobian(m, xi).entries
        scale = tau ** (m.kappa - 1.0)
        assert np.max(np.abs(J1 - scale * J0)) <= 1e-9 * scale * max(
            1.0, np.max(np.abs(J0))
        )


def test_symbolic_jacobian_matches_finite_differences():
    maps = [radial_cube_map(3), diag_map((1.0, 2.0, 3.0)),
            radial_linear_map((1.0, 2.0, 3.0), kappa=2.0),
            random_admissible_map(n=4, seed=7, kappa=3.5)]
    rng = np.random.default_rng(5)
    for m in maps:
        fd = blackbox_of(m)  # drops the jacobian callback: FD path
        for _ in range(50):
            w = rng.standard_normal(m.n)
            w /= np.linalg.norm(w)
            Js = eval_jacobian(m, w).entries
            Jf = eval_jacobian(fd, w).entries
            assert np.max(np.abs(Js - Jf)) <= 1e-6 * max(1.0, np.max(np.abs(Js)))


def test_blackbox_supplied_jacobian_used_exactly():
    m = radial_cube_map(3)
    bb = blackbox_of(m, with_jacobian=True)
    w = np.array([0.3, -0.5, 0.81])
    assert np.array_equal(eval_jacobian(bb, w).entries, eval_jacobian(m, w).entries)


def test_homogeneity_residual_tiny_for_exact_maps():
    for m in (identity_map(3), radial_cube_map(3), complex_square_map(),
              radial_linear_map((1.0, 2.0, 3.0), kappa=2.0),
              random_admissible_map(n=4, seed=7, kappa=3.5)):
        assert homogeneity_residual(m, count=50, seed=0) < 1e-8


def test_homogeneity_residual_flags_shifted_map():
    bb = perturbed_radial_blackbox(n=3, kappa=3.0, shift=(0.01, 0.0, 0.0))
    # the shift contributes |s|(1 - tau^3)/tau^3 relative deviation; at
    # tau = 100 that is about 0.01, far above the 1e-3 alarm level
    assert homogeneity_residual(bb, count=20, seed=0, taus=[100.0]) > 1e-3
    assert homogeneity_residual(bb, count=20, seed=0) > 1e-3


def test_homogeneity_residual_respects_declared_order():
    # right body, wrong declared order: the residual must blow up
    body = BlackBox(eval=lambda x: np.linalg.norm(x) ** 2 * np.asarray(x),
                    declared_kappa=2.0)
    m = MapSpec(body, n=3)
    assert homogeneity_residual(m, count=20, seed=0) > 1e-2


def test_weighted_poly_evaluation_is_stable_at_extreme_scales():
    # |xi|^(kappa-d) P(xi) evaluated as (r**kappa) P(xi/r): no overflow for
    # inputs whose direct monomial evaluation would degrade
    m = radial_linear_map((1.0, 2.0, 3.0), kappa=2.0)
    x = np.array([1e150, 1e150, 1e150])
    v = eval_map(m, x)
    assert np.all(np.isfinite(v))
    u = x / np.linalg.norm(x)
    expected = np.linalg.norm(x) ** 2 * eval_map(m, u)
    assert np.allclose(v, expected, rtol=1e-12)


def test_polymap_equality_on_canonical_form():
    a = PolyMap(2, [[(1.0, (2, 0)), (1.0, (0, 2))], [(2.0, (1, 1))]])
    b = PolyMap(2, [[(1.0, (0, 2)), (0.5, (2, 0)), (0.5, (2, 0))], [(2.0, (1, 1))]])
    assert a == b
