import math

import numpy as np
import pytest
from conftest import breather

from sgspectral import potentials as P
from sgspectral import search as S
from sgspectral.errors import ZeroOnContour
from sgspectral.pruefer import count_report
from sgspectral.scattering import wronskian_batch


def poly(roots):
    roots = np.asarray(roots, dtype=complex)
    return lambda z: np.prod(np.asarray(z, dtype=complex)[:, None] - roots[None, :], axis=1)


# --- argument principle on known analytic functions ----------------------------


@pytest.mark.parametrize(
    "contour, n",
    [
        (S.Rect(-1, 1, 0.1, 2), 2),
        (S.Circle(0.5 + 0.5j, 0.3), 1),
        (S.PolarRect(math.log(0.5), math.log(2), 0.2, 1.5), 1),
        (S.Rect(2, 3, 0.1, 1), 0),
    ],
)
def test_winding_of_polynomial(contour, n):
    f = poly([0.5 + 0.5j, -0.4 + 1.2j, 1.5 - 0.5j])
    assert S.winding_from_sample(S.sample_contour(contour, f)) == n


def test_zero_estimate_is_accurate_for_one_zero():
    z0 = 0.31 + 0.47j
    s = S.sample_contour(S.Circle(0.3 + 0.5j, 0.1), poly([z0]))
    assert abs(S.zero_estimate(s) - z0) < 1e-3


def test_zero_on_contour_is_reported():
    with pytest.raises(ZeroOnContour):
        S.sample_contour(S.Rect(0, 1, 0, 1), poly([0.5 + 0j]), scale=1.0)


def test_batched_sampling_matches_single():
    f = poly([0.5 + 0.5j, -0.4 + 1.2j])
    cells = S.Rect(-1, 1, 0.1, 2).split(0.4321, 0.5789)
    batched = S.sample_contours(cells, f)
    for c, b in zip(cells, batched):
        single = S.sample_contour(c, f)
        assert np.array_equal(single.z, b.z)
    assert sum(S.winding_from_sample(b) for b in batched) == 2


def test_region_geometry():
    r = S.default_region()
    assert abs(math.exp(r.rho0) - 0.05) < 1e-15 and abs(math.exp(r.rho1) - 20) < 1e-12
    assert r.contains(1j) and not r.contains(0.5 + 0j) and not r.contains(25j)
    kids = r.split(0.5, 0.5)
    assert sum(k.contains(0.7 + 0.2j) for k in kids) == 1
    assert r.offset(1e-3).th0 == pytest.approx(r.th0 + 1e-3)
    assert r.to_dict()["kind"] == "annulus-sector"


# --- cached, symmetry-reduced evaluation ----------------------------------------


@pytest.mark.parametrize("p", [P.make_buckingham_miller(), P.make_klaus_shaw_breather(1.3, 1.7)], ids=lambda p: p.name)
def test_evaluator_matches_direct(p):
    z = np.array([0.3 + 0.4j, -0.3 + 0.4j, 2 + 3j, -2 + 3j, 1j, 5j, 30 + 2j])
    W = S.WEvaluator(p)
    w = W(z)
    ref = wronskian_batch(z, p)
    assert np.max(np.abs(w - ref)) < 1e-8 * np.max(np.abs(ref))
    # below |z| = 0.05 the image beyond |z| = 20 is used
    small = np.array([0.02 + 0.03j, -0.01 + 0.001j])
    sign = -1.0 if p.charge % 2 else 1.0
    assert np.max(np.abs(W(small) - sign * np.conj(wronskian_batch(1 / np.conj(small), p)))) < 1e-9
    n = W.evaluations
    W(z)
    assert W.evaluations == n
    with pytest.raises(ValueError):
        W([0.5 - 0.1j])


def test_evaluator_threads_agree():
    p = P.make_klaus_shaw_breather(1.3, 1.7)
    z = np.exp(np.linspace(-1, 1, 40)) * np.exp(1j * np.linspace(0.1, 1.4, 40))
    a = S.WEvaluator(p, workers=1, chunk=8)(z)
    b = S.WEvaluator(p, workers=3, chunk=8)(z)
    assert np.array_equal(a, b)


# --- winding on spectral problems ---------------------------------------------------


def test_winding_around_i(bm, zero):
    assert S.winding_number(S.Circle(1j, 0.2), bm) == 1
    assert S.winding_number(S.Circle(0.5 + 0.5j, 0.2), bm) == 0
    for c in (S.Circle(0.5 + 0.5j, 0.3), S.PolarRect(-1, 1, 0.1, 1.5), S.Rect(0.1, 3, 0.1, 3)):
        assert S.winding_number(c, zero) == 0


def test_additivity(half_breather):
    W = S.WEvaluator(half_breather)
    root = S.default_region()
    n = S.winding_from_sample(S.sample_contour(root, W))
    kids = [S.winding_from_sample(s) for s in S.sample_contours(root.split(0.5789, 0.4321), W)]
    assert n == 2 and sum(kids) == n


# --- search ----------------------------------------------------------------------


def test_search_buckingham_miller(bm):
    res = S.search(bm)
    (pt,) = res.points
    assert abs(pt.z - 1j) < 1e-6 and pt.on_circle and pt.simple
    assert res.winding == 1


def test_search_breathers():
    res = S.search(breather(math.pi / 2, 3.5))
    q = [pt for pt in res.points if pt.z.real > 0]
    assert len(q) == 1 and q[0].on_circle and q[0].simple
    assert S.search(breather(math.pi / 2, 0.9 * math.pi)).points == []


def test_search_perturbation_invariance(half_breather):
    a = [pt.z for pt in S.search(half_breather).points]
    b = [pt.z for pt in S.search(half_breather, S.default_region().offset(1e-3)).points]
    assert len(a) == len(b) and max(abs(x - y) for x, y in zip(a, b)) < 1e-8


def test_search_off_circle_general_profile():
    # a hump with peak beyond pi has eigenvalues off the unit circle; the search finds full orbits
    p = P.make_compact_bump(3.6, 3.0)
    res = S.search(p)
    zs = [pt.z for pt in res.points]
    assert zs and all(pt.residual < 1e-8 for pt in res.points)
    for z in zs:
        for img in (-z.conjugate(), 1 / z.conjugate()):
            if S.default_region().contains(img):
                assert min(abs(img - w) for w in zs) < 1e-7


# --- exclusion regions -----------------------------------------------------------


def test_exclusion_regions(half_breather):
    ex = S.exclusion_regions(half_breather)
    assert ex.C > 0.5 and ex.u0 == pytest.approx(math.pi / 2)
    assert ex.sector == pytest.approx((math.pi / 4, 3 * math.pi / 4))
    assert S.exclusion_winding(half_breather) == {"disk": 0, "sector_complement": 0}
    for pt in S.search(half_breather).points:
        assert not ex.excludes(pt.z)
        th = pt.theta if pt.z.real > 0 else math.pi - pt.theta
        assert th < ex.u0 / 2
    with pytest.raises(Exception):
        S.exclusion_regions(P.make_buckingham_miller())


# --- verification --------------------------------------------------------------------


def _verify(p):
    res = S.search(p)
    return S.verify_spectrum(res.points, p, count_report(p), res.scale)


@pytest.mark.parametrize(
    "p",
    [P.make_buckingham_miller(), breather(math.pi / 4, 1.5 * math.pi), P.make_monotone_kink("erf", 1.0), P.make_smoothed_box(math.pi / 2, 4.0, 0.5)],
    ids=lambda p: p.name,
)
def test_verification_passes_for_hypothesis_profiles(p):
    rep = _verify(p)
    assert rep.passed, [c for c in rep.checks if not c.passed]
    names = {c.name for c in rep.checks}
    assert {"count", "on_circle", "simple", "symmetry_closure", "krein_positive"} <= names


def test_verification_odd_and_general(odd):
    rep = _verify(odd)
    assert rep.get("odd_no_circle").passed
    assert rep.get("count_lower_bound").passed
    with pytest.raises(KeyError):
        rep.get("count")
    assert rep.to_dict()["passed"] is True


def test_verification_flags_wrong_points(half_breather):
    rep = S.verify_spectrum([], half_breather, count_report(half_breather))
    assert not rep.get("count").passed and not rep.passed
