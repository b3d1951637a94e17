import numpy as np
import pytest

from ballerg.exceptions import CompositionUnavailableError, DictionaryError, SpaceError
from ballerg.functions import (
    ONE,
    Dictionary,
    ExplicitPoints,
    MultiIndex,
    PolyFn,
    SphereSample,
    compose_exact,
    coordinate_dictionary,
    differential_at_zero,
    evaluate,
    evaluate_points,
    functions_from_terms,
    hull_membership,
    linear_functional,
    monomial_dictionary,
    seminorm,
)
from ballerg.spaces import C0, L1, PointSet, Vector, backward_shift_vector, basis, norm, zeros
from ballerg.symbols import (
    AffineContracted,
    BackwardShift,
    Composite,
    Conjugated,
    Constant,
    CoordinatePower,
    CoordinateSquare,
    DiagonalLinear,
    ForwardShift,
    MoebiusAuto,
)

POLYNOMIAL_ZOO = [
    ForwardShift(),
    BackwardShift(),
    CoordinateSquare(),
    CoordinatePower(3),
    DiagonalLinear((0.9, -0.5, 0.3), 0.7),
    AffineContracted(0.6, 0.3),
    Constant(Vector([0.2, -0.1j, 0.3])),
    Composite((BackwardShift(), CoordinateSquare())),
    Composite((DiagonalLinear.uniform(0.8), ForwardShift())),
]


def random_polyfn(rng, max_index=6, max_power=3) -> PolyFn:
    terms = {}
    for _ in range(rng.integers(1, 5)):
        exponents = {int(i): int(rng.integers(0, max_power + 1)) for i in rng.choice(np.arange(1, max_index + 1), 2)}
        terms[MultiIndex.of(exponents)] = complex(rng.standard_normal(), rng.standard_normal())
    return PolyFn(terms)


class TestMultiIndex:
    def test_canonical_form(self):
        assert MultiIndex.of({3: 1, 1: 2, 2: 0}) == MultiIndex(((1, 2), (3, 1)))
        assert MultiIndex.of({}) == ONE

    @pytest.mark.parametrize("exponents", [{0: 1}, {1: -1}])
    def test_rejects_invalid(self, exponents):
        with pytest.raises(ValueError):
            MultiIndex.of(exponents)

    def test_properties(self):
        index = MultiIndex.of({2: 3, 5: 1})
        assert index.degree == 4
        assert (index.min_index, index.max_index) == (2, 5)
        assert index.power_of(2) == 3 and index.power_of(1) == 0
        assert str(index) == "x2^3*x5"
        assert index + MultiIndex.of({2: 1}) == MultiIndex.of({2: 4, 5: 1})
        assert index.shifted(-1) == MultiIndex.of({1: 3, 4: 1})
        assert index.scaled(2) == MultiIndex.of({2: 6, 5: 2})


class TestPolyFn:
    def test_zero_terms_dropped(self):
        assert PolyFn({ONE: 0, MultiIndex.of({1: 1}): 2}) == 2 * PolyFn.coordinate(1)
        assert (PolyFn.coordinate(1) - PolyFn.coordinate(1)).is_zero

    def test_algebra(self):
        x1, x2 = PolyFn.coordinate(1), PolyFn.coordinate(2)
        square = (x1 + x2) ** 2
        assert square == x1**2 + 2 * x1 * x2 + x2**2
        assert square.degree == 2 and square.max_index == 2
        assert (square / 2).terms[MultiIndex.of({1: 1, 2: 1})] == 1.0
        assert x1 + 1 == 1 + x1
        assert (x1**0) == PolyFn.constant(1)

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError):
            PolyFn.coordinate(1) ** -1

    def test_hashable(self):
        assert len({PolyFn.coordinate(1), PolyFn.monomial({1: 1})}) == 1

    def test_evaluate(self):
        f = PolyFn.monomial({1: 2, 3: 1}, 2.0) + PolyFn.constant(1j)
        assert evaluate(f, Vector([0.5, 0.9, 0.4])) == pytest.approx(2 * 0.25 * 0.4 + 1j)

    def test_coordinates_past_dim_read_zero(self):
        f = PolyFn.coordinate(5) + PolyFn.constant(3)
        assert evaluate(f, Vector([0.1])) == 3

    def test_evaluate_points(self):
        points = PointSet.of([Vector([0.5]), Vector([0.1j, 0.2])])
        values = evaluate_points(PolyFn.coordinate(1) ** 2, points)
        assert np.allclose(values, [0.25, -0.01])

    def test_functions_from_terms_sums_repeats(self):
        f = functions_from_terms([({1: 1}, 1.0), ({1: 1}, 2.0), ({}, 1j)])
        assert f == 3 * PolyFn.coordinate(1) + 1j


class TestComposeExact:
    @pytest.mark.parametrize(
        "symbol, f, expected",
        [
            (ForwardShift(), PolyFn.monomial({1: 1, 3: 2}), PolyFn.zero()),
            (ForwardShift(), PolyFn.monomial({2: 1, 3: 2}), PolyFn.monomial({1: 1, 2: 2})),
            (BackwardShift(), PolyFn.monomial({1: 2}), PolyFn.monomial({2: 2})),
            (CoordinateSquare(), PolyFn.coordinate(1), PolyFn.monomial({1: 2})),
            (CoordinatePower(3), PolyFn.monomial({1: 1, 2: 1}), PolyFn.monomial({1: 3, 2: 3})),
            (DiagonalLinear((0.5,), 0.25), PolyFn.monomial({1: 1, 2: 2}), PolyFn.monomial({1: 1, 2: 2}, 0.5 / 16)),
            (AffineContracted(0.5, 0.5), PolyFn.coordinate(1) ** 2, (PolyFn.coordinate(1) * 0.5 + 0.5) ** 2),
            (AffineContracted(0.5, 0.5), PolyFn.coordinate(2), PolyFn.zero()),
            (Constant(Vector([0.5])), PolyFn.coordinate(1) + 1, PolyFn.constant(1.5)),
            (Composite((ForwardShift(), ForwardShift())), PolyFn.coordinate(3), PolyFn.coordinate(1)),
        ],
    )
    def test_closed_forms(self, symbol, f, expected):
        assert compose_exact(f, symbol) == expected

    def test_composite_order(self):
        # x1 o (square then shift) = (F(x^2))_1 = 0, x2 o (...) = x1^2
        s = Composite((CoordinateSquare(), ForwardShift()))
        assert compose_exact(PolyFn.coordinate(1), s).is_zero
        assert compose_exact(PolyFn.coordinate(2), s) == PolyFn.monomial({1: 2})

    @pytest.mark.parametrize(
        "symbol", [MoebiusAuto(Vector([0.1])), Conjugated(Vector([0.1]), BackwardShift())]
    )
    def test_unavailable(self, symbol):
        with pytest.raises(CompositionUnavailableError, match="exact composition unavailable; use pointwise"):
            compose_exact(PolyFn.coordinate(1), symbol)

    def test_oracle_equivalence(self, rng):
        xs = rng.standard_normal((1000, 8)) + 1j * rng.standard_normal((1000, 8))
        xs *= (0.9 * rng.uniform(size=1000) / np.linalg.norm(xs, axis=1))[:, None]
        for k, row in enumerate(xs):
            s = POLYNOMIAL_ZOO[k % len(POLYNOMIAL_ZOO)]
            f = random_polyfn(rng)
            x = Vector(row)
            assert abs(evaluate(compose_exact(f, s), x) - evaluate(f, s.apply(x))) <= 1e-10

    @pytest.mark.parametrize("n_h", range(1, 11))
    def test_forward_shift_kills_monomials(self, n_h):
        f = PolyFn.monomial({n_h: 2})
        g = f
        for n in range(1, n_h + 3):
            g = compose_exact(g, ForwardShift())
            if n == n_h - 1:
                assert not g.is_zero
            if n >= n_h:
                assert g.is_zero

    def test_backward_shift_through_linear_functionals(self, rng):
        u = Vector(rng.standard_normal(10) * 0.05, L1)
        recovered = differential_at_zero(compose_exact(linear_functional(u), ForwardShift()), L1)
        assert recovered == backward_shift_vector(u)


class TestDifferential:
    @pytest.mark.parametrize(
        "f, expected",
        [
            (PolyFn.coordinate(1) ** 2, zeros(1)),
            (PolyFn.monomial({2: 1}, 3.0) + PolyFn.monomial({1: 1, 2: 1}), 3 * basis(2)),
            (PolyFn.constant(2.0) + PolyFn.monomial({1: 1}, 1j), Vector([1j])),
        ],
    )
    def test_linear_part(self, f, expected):
        assert differential_at_zero(f) == expected

    def test_linear(self, rng):
        for _ in range(10):
            f, g = random_polyfn(rng), random_polyfn(rng)
            a, b = complex(rng.standard_normal(), rng.standard_normal()), complex(rng.standard_normal(), 0.5)
            combined = differential_at_zero(a * f + b * g)
            expected = a * differential_at_zero(f) + b * differential_at_zero(g)
            assert norm(combined - expected) <= 1e-12


class TestSeminorms:
    def test_sphere_sample_is_on_sphere(self):
        points = SphereSample(t=0.5, count=100, seed=4).realize()
        assert len(points) == 100
        assert all(norm(p) == pytest.approx(0.5, rel=1e-14) for p in points)

    def test_sphere_sample_is_deterministic(self):
        first = SphereSample(t=0.5, count=30, seed=9).realize().as_matrix()
        second = SphereSample(t=0.5, count=30, seed=9).realize().as_matrix()
        assert np.array_equal(first, second)

    def test_sphere_sample_prefix_stable(self):
        # Point i depends only on (seed, i).
        short = SphereSample(t=0.5, count=10, seed=9).realize().as_matrix()
        long = SphereSample(t=0.5, count=30, seed=9).realize().as_matrix()
        assert np.array_equal(short, long[:10])

    @pytest.mark.parametrize("t", [0.0, 1.0, 1.5])
    def test_sphere_radius_range(self, t):
        with pytest.raises(ValueError):
            SphereSample(t=t, count=1, seed=0)

    @pytest.mark.parametrize(
        "kwargs", [{"count": 0, "seed": 0}, {"count": 1, "seed": -1}, {"count": 1, "seed": 0, "dim": 0}]
    )
    def test_sphere_sample_rejects_bad_arguments(self, kwargs):
        with pytest.raises(SpaceError):
            SphereSample(t=0.5, **kwargs)

    def test_sphere_in_c0(self):
        points = SphereSample(t=0.5, count=20, seed=1, space=C0).realize()
        assert all(norm(p) == pytest.approx(0.5) for p in points)
        assert points.space == C0

    def test_seminorm(self):
        spec = ExplicitPoints(PointSet.of([Vector([0.5]), Vector([-0.25])]))
        assert seminorm(PolyFn.coordinate(1), spec) == 0.5
        assert seminorm(PolyFn.zero(), spec) == 0.0

    def test_mapped_spec(self):
        spec = ExplicitPoints(PointSet.of([Vector([0.5])]))
        assert ExplicitPoints.mapped(spec, CoordinateSquare()).realize().points == (Vector([0.25]),)

    def test_spec_dict_records_seed(self):
        assert SphereSample(t=0.5, count=3, seed=11).to_dict()["seed"] == 11


class TestDictionary:
    def test_normalized(self):
        spec = SphereSample(t=0.5, count=200, seed=2)
        dictionary = monomial_dictionary(3, 2).normalized(spec)
        assert dictionary.is_normalized(1e-9)
        for _, f in dictionary:
            assert seminorm(f, spec) == pytest.approx(1.0)

    def test_not_normalized_by_default(self):
        assert not coordinate_dictionary(2).is_normalized(1e-9)

    def test_monomial_dictionary_size(self):
        assert len(monomial_dictionary(8, 2)) == 1 + 8 + 36
        assert len(monomial_dictionary(8, 2, include_constant=False)) == 44
        assert coordinate_dictionary(3).labels == ("x1", "x2", "x3")

    def test_duplicate_labels(self):
        with pytest.raises(DictionaryError):
            Dictionary((("f", PolyFn.coordinate(1)), ("f", PolyFn.coordinate(2))))


class TestHull:
    @pytest.fixture
    def circle(self):
        return PointSet.of([basis(1, 2) * complex(0.5 * np.exp(2j * np.pi * k / 64)) for k in range(64)])

    @pytest.mark.parametrize(
        "x, inside",
        [
            (zeros(2), True),
            (Vector([0.3, 0]), True),
            (Vector([0.3j, 0]), True),
            (Vector([0.7, 0]), False),
            (Vector([0, 0.25]), False),
        ],
    )
    def test_circle_hull_is_disc(self, circle, x, inside):
        assert hull_membership(x, circle, monomial_dictionary(2, 3)) is inside

    def test_points_of_the_set_are_in_hull(self, circle):
        assert all(hull_membership(x, circle, monomial_dictionary(2, 3)) for x in circle)

    @pytest.fixture
    def candidates(self, rng):
        raw = rng.uniform(-0.8, 0.8, (60, 2)) + 1j * rng.uniform(-0.8, 0.8, (60, 2))
        return [Vector(row) for row in raw]

    def test_more_functions_shrink_hull(self, circle, candidates):
        larger = monomial_dictionary(2, 3)
        smaller = Dictionary(larger.entries[:4])
        for x in candidates:
            if hull_membership(x, circle, larger):
                assert hull_membership(x, circle, smaller)

    def test_larger_set_grows_hull(self, circle, candidates):
        half = PointSet.of(circle.points[::2])
        dictionary = monomial_dictionary(2, 3)
        for x in candidates + list(circle):
            if hull_membership(x, half, dictionary):
                assert hull_membership(x, circle, dictionary)

    def test_space_mismatch(self, circle):
        with pytest.raises(SpaceError):
            hull_membership(Vector([0.1], L1), circle, coordinate_dictionary(1))
