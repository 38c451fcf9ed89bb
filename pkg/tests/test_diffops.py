"""Difference operators: first, second, k-th order, and shift-and-center."""

import math

import numpy as np
import pytest

from conecheck import catalog
from conecheck.cones import Point, nonneg_orthant, psd_cone
from conecheck.diffops import FunctionHandle, delta, kth_diff, second_diff, shift_and_center
from conecheck.errors import CapabilityError, DomainError


def _scalar(label, fn, cone=None):
    return FunctionHandle(label, cone or nonneg_orthant(1), lambda rows: fn(rows[:, 0]))


def p(*xs):
    return Point.vector(list(xs))


def test_delta_affine():
    f = _scalar("affine", lambda x: 3.0 * x + 1.0)
    assert delta(f, p(2.0), p(5.0)) == pytest.approx(6.0)


def test_delta_log1p_at_zero_base():
    f = _scalar("log1p", np.log1p)
    assert delta(f, p(1.0), p(0.0)) == pytest.approx(math.log(2.0))


def test_delta_zero_increment():
    f = _scalar("sqrt", np.sqrt)
    assert delta(f, p(0.0), p(3.0)) == 0.0


def test_second_diff_squared_norm_value():
    h = catalog.instantiate("sq-norm", dim=2)
    for z in (p(0.0, 0.0), p(1.0, 2.0), p(0.3, 0.1)):
        val = second_diff(h, p(1.0, 1.0), p(2.0, 3.0), z)
        assert abs(val - 10.0) <= 1e-9


def test_second_diff_geomean_printed_value():
    h = catalog.instantiate("geomean2")
    val = second_diff(h, p(1 / 3, 1 / 3), p(1 / 3, 2 / 3), p(0.0, 0.0))
    assert val == pytest.approx(0.0117587268, abs=1e-9)
    # exact closed form: sqrt(2/3) - 1/3 - sqrt(2)/3
    assert val == pytest.approx(math.sqrt(2 / 3) - 1 / 3 - math.sqrt(2.0) / 3, abs=1e-14)


def test_second_diff_symmetry_is_exact():
    h = catalog.instantiate("lse", dim=3)
    rng = np.random.default_rng(0)
    for _ in range(50):
        x, y, z = (Point.vector(rng.normal(size=3)) for _ in range(3))
        assert second_diff(h, x, y, z) == second_diff(h, y, x, z)


def test_second_diff_linearity():
    f = _scalar("sq", lambda x: x * x)
    g = _scalar("log1p", np.log1p)
    a, b = 2.5, -1.25
    comb = _scalar("comb", lambda x: a * x * x + b * np.log1p(x))
    rng = np.random.default_rng(1)
    for _ in range(100):
        x, y, z = (p(abs(rng.normal())) for _ in range(3))
        lhs = second_diff(comb, x, y, z)
        rhs = a * second_diff(f, x, y, z) + b * second_diff(g, x, y, z)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


def test_second_diff_annihilates_affine():
    c = np.array([1.5, -0.5, 2.0])
    h = FunctionHandle("affine", nonneg_orthant(3), lambda rows: rows @ c + 4.0)
    rng = np.random.default_rng(2)
    for _ in range(1000):
        x, y, z = (Point.vector(np.abs(rng.normal(size=3))) for _ in range(3))
        scale = max(1.0, abs(h(x)), abs(h(y)), abs(h(z)))
        assert abs(second_diff(h, x, y, z)) <= 5e-12 * scale


def test_kth_diff_low_orders_reduce():
    f = _scalar("sig", lambda x: 1.0 / (1.0 + np.exp(-x)))
    x, y, z = p(0.4), p(0.9), p(0.2)
    assert kth_diff(f, [x], z) == pytest.approx(delta(f, x, z), abs=1e-15)
    assert kth_diff(f, [x, y], z) == pytest.approx(second_diff(f, x, y, z), abs=1e-15)


def test_kth_diff_sign_of_exponential():
    # k-th differences of exp(-2x) carry the sign (-1)^k
    f = _scalar("expneg", lambda x: np.exp(-2.0 * x))
    val = kth_diff(f, [p(0.3), p(0.7), p(0.1)], p(0.5))
    assert (-1.0) ** 3 * val >= 0.0


def test_kth_diff_matches_recursive_delta():
    f = _scalar("smooth", lambda x: np.log1p(x) + 0.1 * x * x)

    def recursive(fh, xs, base):
        if len(xs) == 1:
            return delta(fh, xs[0], base)
        return recursive(fh, xs[:-1], xs[-1] + base) - recursive(fh, xs[:-1], base)

    rng = np.random.default_rng(3)
    for k in range(1, 7):
        xs = [p(abs(rng.normal())) for _ in range(k)]
        base = p(abs(rng.normal()))
        a = kth_diff(f, xs, base)
        b = recursive(f, xs, base)
        assert a == pytest.approx(b, rel=1e-11, abs=1e-11)


def test_kth_diff_order_cap():
    f = _scalar("id", lambda x: x)
    with pytest.raises(CapabilityError):
        kth_diff(f, [p(0.1)] * 13, p(0.0))


def test_shift_and_center_exponential():
    f = _scalar("expneg", lambda x: np.exp(-x))
    g = shift_and_center(f, p(0.0))
    assert g(p(0.0)) == 0.0  # exactly zero by construction
    assert g(p(1.0)) == pytest.approx(math.exp(-1.0) - 1.0)
    assert g(p(2.0)) <= 0.0


def test_shift_and_center_logistic_power():
    a, beta = 1.0, 2.0
    f = catalog.instantiate("logistic-pow", params={"a": a, "beta": beta})
    g = shift_and_center(f, p(0.0))
    for x in (0.0, 0.5, 2.0):
        assert g(p(x)) == pytest.approx((1 + a * math.exp(-x)) ** beta - (1 + a) ** beta)


def test_shift_and_center_matches_shifted_det_entry():
    beta = 0.5
    base = FunctionHandle(
        "det-recip-of-shift",
        psd_cone(2),
        lambda rows: np.linalg.det(np.eye(2) + rows) ** (-beta),
    )
    g = shift_and_center(base, Point.matrix(np.zeros((2, 2))))
    entry = catalog.instantiate("det-shift-recip", params={"beta": beta}, dim=2)
    rng = np.random.default_rng(4)
    for _ in range(25):
        gm = rng.normal(size=(2, 2))
        a = Point.matrix(gm @ gm.T)
        assert g(a) == pytest.approx(entry(a), rel=1e-10, abs=1e-12)


def test_shift_and_center_undefined_shift_point():
    f = catalog.instantiate("reciprocal")
    with pytest.raises(DomainError):
        shift_and_center(f, p(0.0))


def test_handle_rejects_incompatible_points():
    f = catalog.instantiate("lse", dim=3)
    with pytest.raises(Exception):
        f(Point.vector([1.0, 2.0]))


def test_from_pointwise_wraps_domain_errors_as_nan():
    def fn(pt):
        if pt.data[0] > 1.0:
            raise DomainError("out")
        return float(pt.data[0])

    h = FunctionHandle.from_pointwise("partial", nonneg_orthant(1), fn)
    vals = h.batch(np.array([[0.5], [2.0]]))
    assert vals[0] == 0.5 and np.isnan(vals[1])
    with pytest.raises(DomainError):
        h(p(2.0))


def test_second_diff_lse_at_unit_box_triple():
    """At x=(1,0), y=(0,1), z=(1,1) the four log-sum-exp terms simplify to
    1 - 2 log((1+e)/2), which is negative (no violation at this triple)."""
    h = catalog.instantiate("lse", dim=2)
    val = second_diff(h, p(1.0, 0.0), p(0.0, 1.0), p(1.0, 1.0))
    assert val == pytest.approx(1.0 - 2.0 * math.log((1.0 + math.e) / 2.0), abs=1e-12)
    assert val < 0
