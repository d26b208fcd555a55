import numpy as np
import pytest

from zetalab.metrics import (CompactRectangle, ExhaustionFamily, ProductPoint,
                             StripDomain, circle_distance, metric_d_phi,
                             product_metric, seminorm, torus_distance)

SEED = 20250810


def random_samples(rng, rect):
    shape = (rect.resolution, rect.resolution)
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


# ---------------------------------------------------------------------------
# domains and exhaustion

def test_strip_validation():
    StripDomain(0.5)
    StripDomain(0.75)
    with pytest.raises(ValueError):
        StripDomain(0.4)
    with pytest.raises(ValueError):
        StripDomain(1.0)
    with pytest.raises(ValueError):
        StripDomain(0.6, sigma_high=0.9)


def test_rectangle_validation_and_grid():
    r = CompactRectangle(0.6, 0.8, 0.5, resolution=5)
    assert r.points().shape == (5, 5)
    assert r.points()[0, 0] == pytest.approx(0.6 - 0.5j)
    assert r.points()[-1, -1] == pytest.approx(0.8 + 0.5j)
    with pytest.raises(ValueError):
        CompactRectangle(0.8, 0.6, 0.5)
    with pytest.raises(ValueError):
        CompactRectangle(0.6, 0.8, -1.0)


def test_offset_raised_to_keep_first_level_nonempty():
    fam = ExhaustionFamily(StripDomain(0.5), offset=2)
    assert fam.offset == 4  # requested 2 is too small for a width-1/2 strip
    k1 = fam.rect(1)
    assert k1.sigma_left < k1.sigma_right
    assert (k1.sigma_left, k1.sigma_right, k1.height) == (0.7, 0.8, 1.0)
    # a narrower strip needs a larger offset; the constructor records it
    fam2 = ExhaustionFamily(StripDomain(0.9), offset=2)
    assert 2.0 / (1 + fam2.offset) < 0.1
    assert fam2.rect(1).sigma_left < fam2.rect(1).sigma_right


def test_exhaustion_nesting_and_coverage():
    fam = ExhaustionFamily(StripDomain(0.5))
    for ell in range(1, 51):
        inner, outer = fam.rect(ell), fam.rect(ell + 1)
        assert outer.sigma_left < inner.sigma_left
        assert inner.sigma_right < outer.sigma_right
        assert inner.height < outer.height
    # margins shrink to zero and heights diverge, so every strip point is covered
    assert fam.margin(10**6) < 1e-5


def test_every_compact_rectangle_is_contained():
    fam = ExhaustionFamily(StripDomain(0.5))
    rng = np.random.default_rng(SEED)
    for _ in range(200):
        a, b = np.sort(rng.uniform(0.5 + 1e-6, 1 - 1e-6, size=2))
        rect = CompactRectangle(float(a), float(b), float(rng.uniform(0, 30)))
        ell = fam.level_for(rect)
        k = fam.rect(ell)
        assert k.sigma_left <= rect.sigma_left and rect.sigma_right <= k.sigma_right
        assert rect.height <= k.height
        if ell > 1:  # minimality: the previous level must fail
            prev = fam.rect(ell - 1)
            assert (prev.sigma_left > rect.sigma_left
                    or rect.sigma_right > prev.sigma_right
                    or rect.height > prev.height)


def test_rectangle_outside_strip_rejected():
    fam = ExhaustionFamily(StripDomain(0.6))
    with pytest.raises(ValueError):
        fam.level_for(CompactRectangle(0.55, 0.8, 1.0))


# ---------------------------------------------------------------------------
# seminorms and the exhaustion metric

def test_seminorm_basic_identities():
    rng = np.random.default_rng(SEED)
    rect = CompactRectangle(0.6, 0.8, 1.0, resolution=9)
    f = random_samples(rng, rect)
    g = random_samples(rng, rect)
    assert seminorm(f, f, rect) == 0.0
    c = 1.5 - 2j
    assert seminorm(f, f + c, rect) == pytest.approx(abs(c))
    assert seminorm(f, g, rect) == seminorm(g, f, rect)
    with pytest.raises(ValueError, match="grid mismatch"):
        seminorm(f[:3], g, rect)


def test_seminorm_monotone_under_grid_refinement():
    # sup over a subset of points cannot exceed sup over a superset
    fam = ExhaustionFamily(StripDomain(0.5), resolution=9)
    fn = lambda z: z**2 - 1.3 * z
    for ell in (1, 2, 5):
        small = np.max(np.abs(fn(fam.rect(ell).points())))
        union = np.concatenate([fam.rect(ell).points().ravel(),
                                fam.rect(ell + 1).points().ravel()])
        assert small <= np.max(np.abs(fn(union)))


def test_metric_d_phi_identity_and_cap():
    rng = np.random.default_rng(SEED)
    fam = ExhaustionFamily(StripDomain(0.5), resolution=7)
    L = 10
    f = fam.sample(lambda z: np.exp(z), L)
    g = fam.sample(lambda z: 100.0 * z, L)
    assert metric_d_phi(f, f, fam, L) == 0.0
    d = metric_d_phi(f, g, fam, L)
    assert 0.0 < d < 1.0  # capped terms sum below 1
    with pytest.raises(ValueError):
        metric_d_phi(f, g, fam, 0)
    with pytest.raises(ValueError):
        metric_d_phi(f[:2], g, fam, L)


def test_metric_d_phi_triangle_inequality():
    rng = np.random.default_rng(SEED)
    fam = ExhaustionFamily(StripDomain(0.5), resolution=5)
    L = 4
    rects = [fam.rect(ell) for ell in range(1, L + 1)]
    for _ in range(100):
        f = [random_samples(rng, r) for r in rects]
        g = [random_samples(rng, r) for r in rects]
        h = [random_samples(rng, r) for r in rects]
        dfg = metric_d_phi(f, g, fam, L)
        dfh = metric_d_phi(f, h, fam, L)
        dhg = metric_d_phi(h, g, fam, L)
        assert dfg <= dfh + dhg + 1e-12
        assert dfg == pytest.approx(metric_d_phi(g, f, fam, L))


# ---------------------------------------------------------------------------
# torus distance

def test_torus_distance_cases():
    assert torus_distance(1.0, 1.0) == 0.0
    x = np.exp(2j * np.pi * 0.3)
    y = np.exp(2j * np.pi * 0.9)
    assert torus_distance(x, y) == pytest.approx(0.4)
    assert torus_distance(1.0, -1.0) == pytest.approx(0.5)  # antipodal maximum
    with pytest.raises(ValueError):
        torus_distance(0.5, 1.0)


def test_circle_distance_wraps():
    assert circle_distance(0.95, 0.05) == pytest.approx(0.1)
    assert circle_distance(0.2, 0.7) == pytest.approx(0.5)


def test_torus_metric_axioms_random():
    rng = np.random.default_rng(SEED)
    for _ in range(300):
        x, y, z = np.exp(2j * np.pi * rng.random(3))
        assert torus_distance(x, y) == pytest.approx(torus_distance(y, x))
        assert torus_distance(x, y) <= torus_distance(x, z) + torus_distance(z, y) + 1e-12
        assert 0.0 <= torus_distance(x, y) <= 0.5


# ---------------------------------------------------------------------------
# product metric

def make_point(rng, fam, L, num_torus):
    rects = [fam.rect(ell) for ell in range(1, L + 1)]
    funcs = [tuple(random_samples(rng, r) for r in rects)]
    torus = np.exp(2j * np.pi * rng.random(num_torus))
    return ProductPoint.build(funcs, torus)


def test_product_metric_identity_and_antipode():
    rng = np.random.default_rng(SEED)
    fam = ExhaustionFamily(StripDomain(0.5), resolution=5)
    a = make_point(rng, fam, 3, 2)
    assert product_metric(a, a, [fam]) == 0.0
    flipped = ProductPoint.build(a.functions, (a.torus[0], -a.torus[1]))
    assert product_metric(a, flipped, [fam]) == pytest.approx(0.5)


def test_product_metric_is_ordered():
    # distinct per-slot values: swapping slots changes the distance
    rng = np.random.default_rng(SEED)
    fam = ExhaustionFamily(StripDomain(0.5), resolution=5)
    L = 2
    rects = [fam.rect(ell) for ell in range(1, L + 1)]
    # keep sups below the cap so the slot values stay distinguishable
    f = tuple(0.2 * random_samples(rng, r) for r in rects)
    g = tuple(0.05 * random_samples(rng, r) for r in rects)
    a = ProductPoint.build([f, g], [1.0, 1.0])
    swapped = ProductPoint.build([g, f], [1.0, 1.0])
    fams = [fam, fam]
    # slots are ordered: equal multisets of functions are still far apart
    assert product_metric(a, swapped, fams) > 0.01
    assert product_metric(a, a, fams) == 0.0


def test_product_metric_shape_mismatch():
    rng = np.random.default_rng(SEED)
    fam = ExhaustionFamily(StripDomain(0.5), resolution=5)
    a = make_point(rng, fam, 3, 2)
    b = make_point(rng, fam, 3, 1)
    with pytest.raises(ValueError):
        product_metric(a, b, [fam])


def test_product_metric_axioms_random():
    rng = np.random.default_rng(SEED)
    fam = ExhaustionFamily(StripDomain(0.5), resolution=5)
    fams = [fam]
    pts = [make_point(rng, fam, 3, 2) for _ in range(12)]
    for x in pts[:6]:
        for y in pts[6:]:
            assert product_metric(x, y, fams) == pytest.approx(product_metric(y, x, fams))
    for x, y, z in zip(pts[:4], pts[4:8], pts[8:]):
        assert (product_metric(x, y, fams)
                <= product_metric(x, z, fams) + product_metric(z, y, fams) + 1e-12)
