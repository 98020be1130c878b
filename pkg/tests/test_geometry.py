import math

import numpy as np
import pytest

from catalog import CATALOG, s3_t2, sphere_point, t2_circle, t3_point
from hoferbound.errors import (
    AssumptionViolated,
    BadParameters,
    CapTooSmall,
    FocalPointEndpoint,
)
from hoferbound.geometry import (
    FlatTorus,
    GreatSubsphere,
    Product,
    ProductOf,
    RoundSphere,
    SinglePoint,
    Subtorus,
    check_assumption,
    enumerate_geodesics,
    is_focal_point,
    jacobi_oracle,
    make_class,
    morse_index,
    shape_operator,
    submanifold_dimension,
    whole,
)

TWO_PI = 2 * math.pi


def test_torus_straight_line():
    m, q, x1, c = t3_point()
    gs = enumerate_geodesics(m, q, x1, c, 5.0)
    assert len(gs) == 1
    assert gs[0].length == pytest.approx(1.3, abs=1e-12)
    assert gs[0].morse_index == 0


def test_torus_other_class_and_cap():
    m, q, x1, _ = t3_point()
    c = make_class(m, q, [1, 2, 0])
    gs = enumerate_geodesics(m, q, x1, c, 5.0)
    assert gs[0].length == pytest.approx(math.hypot(1.3, 2.0), abs=1e-12)
    assert enumerate_geodesics(m, q, x1, c, 2.0) == []


def test_torus_skew_lattice():
    m = FlatTorus(((1.0, 0.0), (0.5, 1.0)))
    q = SinglePoint((0.0, 0.0))
    c = make_class(m, q, [0, 1])
    gs = enumerate_geodesics(m, q, (0.1, 0.1), c, 5.0)
    # translate (0,1) in lattice coordinates is (0.5, 1.0) in R^2
    assert gs[0].length == pytest.approx(math.hypot(0.6, 1.1), abs=1e-12)


def test_sphere_point_lengths_and_indices():
    m, q, x1, c = sphere_point(3)
    gs = enumerate_geodesics(m, q, x1, c, 8.0)
    assert [g.length for g in gs] == pytest.approx([1.0, TWO_PI - 1, TWO_PI + 1], abs=1e-12)
    assert [g.morse_index for g in gs] == [0, 2, 4]


def test_s2_index():
    m, q, x1, c = sphere_point(2)
    gs = enumerate_geodesics(m, q, x1, c, 8.0)
    assert [g.morse_index for g in gs] == [0, 1, 2]


def test_subtorus_vertical_geodesic():
    m, q, x1, c = t2_circle()
    gs = enumerate_geodesics(m, q, x1, c, 3.0)
    assert len(gs) == 1
    assert gs[0].length == pytest.approx(0.25, abs=1e-12)
    assert gs[0].initial_covector == pytest.approx((0.0, 1.0), abs=1e-12)


def test_subtorus_class_canonical():
    m, q, _, _ = t2_circle()
    assert make_class(m, q, [3, 1]) == make_class(m, q, [0, 1])
    assert make_class(m, q, [0, 1]) != make_class(m, q, [0, 2])


def test_sphere_radius_scales_lengths():
    m = RoundSphere(3, 2.0)
    q = SinglePoint((2.0, 0, 0, 0))
    x1 = (2 * math.cos(0.5), 2 * math.sin(0.5), 0, 0)
    gs = enumerate_geodesics(m, q, x1, make_class(m, q, None), 20.0)
    assert [g.length for g in gs][:2] == pytest.approx([1.0, 2 * (TWO_PI - 0.5)], abs=1e-12)


def test_antipode_is_focal():
    m, q, _, c = sphere_point(3)
    assert is_focal_point(m, q, (-1.0, 0, 0, 0))
    with pytest.raises(FocalPointEndpoint):
        enumerate_geodesics(m, q, (-1.0, 0, 0, 0), c, 8.0)


def test_endpoint_on_q_rejected():
    m, q, _, c = sphere_point(3)
    with pytest.raises(BadParameters):
        enumerate_geodesics(m, q, (1.0, 0, 0, 0), c, 8.0)


def test_dimensions_and_shape_operator():
    m, q, _, _ = s3_t2()
    assert m.dimension == 5
    assert submanifold_dimension(m, q) == 2
    m2 = RoundSphere(3)
    q2 = GreatSubsphere(((1, 0, 0, 0), (0, 1, 0, 0)))
    assert submanifold_dimension(m2, q2) == 1
    S = shape_operator(m2, q2)
    assert S.shape == (1, 1) and np.all(S == 0)


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_focal_times_sum_to_index(name):
    m, q, x1, c = CATALOG[name]()
    for g in enumerate_geodesics(m, q, x1, c, 8.0):
        assert sum(k for _, k in g.focal_times) == g.morse_index == morse_index(g)
        assert all(0 < t < 1 for t, _ in g.focal_times)
        assert np.linalg.norm(g.initial_covector) == pytest.approx(1.0, abs=1e-12)


def test_jacobi_oracle_s3_long():
    m, q, x1, c = sphere_point(3)
    g = enumerate_geodesics(m, q, x1, c, 8.0)[2]
    idx, times = jacobi_oracle(m, q, g)
    assert idx == 4
    ell = TWO_PI + 1
    assert [k for _, k in times] == [2, 2]
    assert [t for t, _ in times] == pytest.approx([math.pi / ell, TWO_PI / ell], abs=1e-6)


def test_jacobi_oracle_short_and_flat():
    m, q, x1, c = sphere_point(3)
    assert jacobi_oracle(m, q, enumerate_geodesics(m, q, x1, c, 2.0)[0]) == (0, ())
    m, q, x1, c = t3_point()
    assert jacobi_oracle(m, q, enumerate_geodesics(m, q, x1, c, 2.0)[0])[0] == 0


def test_jacobi_oracle_rejects_few_steps():
    m, q, x1, c = sphere_point(3)
    with pytest.raises(BadParameters):
        jacobi_oracle(m, q, enumerate_geodesics(m, q, x1, c, 2.0)[0], steps=100)


def test_assumption_s3_holds():
    m, q, x1, c = sphere_point(3)
    rep = check_assumption(m, q, x1, c, 0, 2.0)
    assert rep.holds
    assert rep.l_k == pytest.approx(1.0)
    assert rep.L == pytest.approx(TWO_PI - 1)
    assert rep.certification == ("sphere-index-gap",)


def test_assumption_t2_point_fails_iv():
    m = FlatTorus.standard(2)
    q = SinglePoint((0.0, 0.0))
    c = make_class(m, q, [0, 0])
    with pytest.raises(AssumptionViolated) as exc:
        check_assumption(m, q, (0.3, 0.2), c, 0, 5.0)
    assert exc.value.clause == "iv"
    rep = check_assumption(m, q, (0.3, 0.2), c, 0, 5.0, strict=False)
    assert rep.failing_clause == "iv"


def test_assumption_s2_fails_iii():
    m, q, x1, c = sphere_point(2)
    with pytest.raises(AssumptionViolated) as exc:
        check_assumption(m, q, x1, c, 0, 2.0)
    assert exc.value.clause == "iii"


def test_assumption_t2_circle_holds():
    m, q, x1, c = t2_circle()
    rep = check_assumption(m, q, x1, c, 0, 3.0)
    assert rep.holds and not rep.index_adjacent


def test_assumption_k2_on_s3():
    m, q, x1, c = sphere_point(3)
    rep = check_assumption(m, q, x1, c, 2, 1.0)
    assert rep.holds
    assert rep.l_k == pytest.approx(TWO_PI - 1)
    assert rep.L == pytest.approx(TWO_PI + 1)  # 4*pi - 1 already has index 6


def test_assumption_needs_metadata():
    m, q, x1, c = sphere_point(3)
    with pytest.raises(CapTooSmall):
        check_assumption(m, q, x1, c, 0, 2.0, trust_metadata=False)


def test_product_pairs_with_constant_point():
    m, q, x1, c = s3_t2()
    prod = enumerate_geodesics(m, q, x1, c, 8.0)
    ms, qs, xs, cs = sphere_point(3)
    single = enumerate_geodesics(ms, qs, xs, cs, 8.0)
    assert [g.length for g in prod] == pytest.approx([g.length for g in single], abs=1e-12)
    assert [g.morse_index for g in prod] == [g.morse_index for g in single]


def test_product_assumption_holds():
    m, q, x1, c = s3_t2()
    rep = check_assumption(m, q, x1, c, 0, 2.0)
    assert rep.holds
    assert rep.certification[0] == "product"


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_cap_doubling_only_appends(name):
    m, q, x1, c = CATALOG[name]()
    small = enumerate_geodesics(m, q, x1, c, 4.0)
    big = enumerate_geodesics(m, q, x1, c, 8.0)
    assert [g.length for g in big[: len(small)]] == [g.length for g in small]
    assert all(g.length > 4.0 for g in big[len(small):])


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_minimizer_has_index_zero(name):
    m, q, x1, c = CATALOG[name]()
    assert enumerate_geodesics(m, q, x1, c, 8.0)[0].morse_index == 0


def test_whole_submanifolds():
    assert submanifold_dimension(FlatTorus.standard(2), whole(FlatTorus.standard(2))) == 2
    m = Product(RoundSphere(2), FlatTorus.standard(1))
    assert isinstance(whole(m), ProductOf)


def test_bad_manifolds():
    with pytest.raises(BadParameters):
        FlatTorus(((1.0, 0.0), (2.0, 0.0)))
    with pytest.raises(BadParameters):
        RoundSphere(1)
    with pytest.raises(BadParameters):
        RoundSphere(2, 0.0)
    with pytest.raises(BadParameters):
        make_class(RoundSphere(2), SinglePoint((1.0, 0, 0)), [1])
    with pytest.raises(BadParameters):
        make_class(FlatTorus.standard(2), Subtorus(((1, 0),), (0.0, 0.0)), [1])
