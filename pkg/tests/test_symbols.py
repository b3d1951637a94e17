import numpy as np
import pytest

from ballerg.exceptions import ConvergenceError, DimensionCapError, SpaceError, SymbolError
from ballerg.functions import SphereSample
from ballerg.moebius import rho_bound
from ballerg.spaces import C0, L1, L2, PointSet, Vector, basis, distance, zeros
from ballerg.symbols import (
    AffineContracted,
    AffineHalf,
    BackwardShift,
    Composite,
    Conjugated,
    Constant,
    CoordinatePower,
    CoordinateSquare,
    DiagonalLinear,
    ForwardShift,
    MoebiusAuto,
    apply,
    conjugate,
    fixed_point,
    fixes_origin,
    image_radius,
    iterate,
    recenter,
    schwarz_profile,
    stability_probe,
)

FIX_ZERO_ZOO = [
    ForwardShift(),
    BackwardShift(),
    CoordinateSquare(),
    CoordinatePower(3),
    DiagonalLinear((0.9, -0.5, 0.3), 0.7),
    AffineContracted(0.8, 0.0),
    Composite((BackwardShift(), CoordinateSquare())),
]


class TestApply:
    @pytest.mark.parametrize(
        "symbol, x, expected",
        [
            (ForwardShift(), Vector([0.1, 0.2]), Vector([0, 0.1, 0.2])),
            (BackwardShift(), Vector([0.1, 0.2]), Vector([0.2])),
            (AffineHalf(), Vector([0.5, 0.3]), Vector([0.75])),
            (AffineContracted(0.5, 0.25), Vector([0.5]), Vector([0.5])),
            (CoordinateSquare(), Vector([0.5, -0.5j]), Vector([0.25, -0.25])),
            (CoordinatePower(3), Vector([0.5]), Vector([0.125])),
            (DiagonalLinear((0.5,), 0.25), Vector([0.4, 0.4, 0.4]), Vector([0.2, 0.1, 0.1])),
            (DiagonalLinear((0.5, -1.0)), Vector([0.4, 0.4, 0.4]), Vector([0.2, -0.4, -0.4])),
            (Constant(Vector([0.1, 0.1])), Vector([0.9]), Vector([0.1, 0.1])),
            (Composite((ForwardShift(), CoordinateSquare())), Vector([0.5]), Vector([0, 0.25])),
            (Composite((AffineHalf(), ForwardShift())), Vector([0.5]), Vector([0, 0.75])),
        ],
    )
    def test_closed_forms(self, symbol, x, expected):
        assert apply(symbol, x) == expected

    def test_outside_ball_rejected(self):
        with pytest.raises(SpaceError):
            BackwardShift().apply(basis(1))

    def test_dimension_cap(self):
        shift = ForwardShift(dim_cap=3)
        assert shift(Vector([0.1, 0.1])).dim == 3
        with pytest.raises(DimensionCapError):
            shift(Vector([0.1, 0.1, 0.1]))

    def test_rows_match_vector_form(self, rng):
        matrix = 0.3 * (rng.standard_normal((20, 4)) + 1j * rng.standard_normal((20, 4))) / 4
        for s in FIX_ZERO_ZOO + [MoebiusAuto(Vector([0.2, 0.1j])), Constant(Vector([0.3]))]:
            rows = s.apply_rows(matrix, L2)
            for x, y in zip(matrix, rows):
                expected = s.apply(Vector(x)).padded(8).coords
                assert np.allclose(Vector(y).padded(8).coords, expected, atol=1e-15)

    def test_constant_space_mismatch(self):
        with pytest.raises(SpaceError):
            Constant(Vector([0.1], L1)).apply(Vector([0.1], L2))


class TestConstruction:
    @pytest.mark.parametrize(
        "factory",
        [
            lambda: AffineContracted(0.8, 0.4),
            lambda: AffineContracted(0.0, 1.0),
            lambda: AffineContracted(0.0, -1.0),
            lambda: CoordinatePower(0),
            lambda: CoordinatePower(1.5),
            lambda: DiagonalLinear(()),
            lambda: DiagonalLinear((1.2,)),
            lambda: Constant(basis(1)),
            lambda: MoebiusAuto(Vector([1.0])),
            lambda: MoebiusAuto(Vector([0.1], C0)),
            lambda: Composite(()),
        ],
    )
    def test_invalid_symbols(self, factory):
        with pytest.raises(SymbolError):
            factory()

    def test_tail_defaults_to_last_weight(self):
        assert DiagonalLinear((0.5, 0.25)).tail == 0.25
        assert list(DiagonalLinear.uniform(0.3).weight_vector(3)) == [0.3, 0.3, 0.3]

    @pytest.mark.parametrize(
        "symbol, polynomial",
        [(ForwardShift(), True), (MoebiusAuto(Vector([0.1])), False), (Composite((BackwardShift(),)), True)],
    )
    def test_is_polynomial(self, symbol, polynomial):
        assert symbol.is_polynomial is polynomial


class TestIterate:
    def test_affine_escape_norms_are_exact(self):
        orbit = iterate(AffineHalf(), zeros(1, C0), 40)
        assert orbit.length == 41
        assert all(size == 1.0 - 2.0**-n for n, size in enumerate(orbit.norms))

    def test_negative_n(self):
        with pytest.raises(ValueError):
            iterate(BackwardShift(), zeros(1), -1)

    def test_rounding_onto_sphere_raises(self):
        with pytest.raises(SpaceError, match="at step 54"):
            iterate(AffineHalf(), zeros(1, C0), 60)

    def test_stop_at_boundary_cuts_orbit(self):
        orbit = iterate(AffineHalf(), zeros(1, C0), 60, stop_at_boundary=True)
        assert orbit.reached_boundary
        assert orbit.length == 54
        assert max(orbit.norms) == 1.0 - 2.0**-53
        assert not iterate(AffineHalf(), zeros(1, C0), 40, stop_at_boundary=True).reached_boundary

    @pytest.mark.parametrize("symbol", FIX_ZERO_ZOO)
    def test_origin_fixing_orbits_never_grow(self, symbol, random_ball_vector):
        orbit = iterate(symbol, random_ball_vector(6, 0.8), 25)
        assert all(later <= earlier + 1e-15 for earlier, later in zip(orbit.norms, orbit.norms[1:]))

    @pytest.mark.parametrize("m", [2, 3, 5])
    def test_coordinate_power_orbit_closed_form(self, m):
        c = complex(0.95 * np.exp(0.4j))
        orbit = iterate(CoordinatePower(m), c * basis(1), 4)
        for k, point in enumerate(orbit.points):
            assert distance(point, c ** (m**k) * basis(1)) <= 1e-12


class TestFixedPoints:
    def test_conjugate_fixes_a(self, random_ball_vector):
        a = random_ball_vector(8, 0.6)
        psi = conjugate(a, DiagonalLinear.uniform(0.5))
        assert isinstance(psi, Conjugated)
        assert distance(psi(a), a) <= 1e-12
        assert distance(fixed_point(psi), a) <= 1e-8

    def test_conjugation_is_an_involution(self, random_ball_vector):
        a = random_ball_vector(5, 0.7)
        s = DiagonalLinear((0.5, -0.3), 0.2)
        twice = conjugate(a, conjugate(a, s))
        for _ in range(20):
            x = random_ball_vector(5, 0.9)
            assert distance(twice(x), s(x)) <= 1e-9

    def test_conjugate_requires_hilbert(self):
        with pytest.raises(SpaceError):
            conjugate(Vector([0.1], L1), BackwardShift())

    def test_not_contracting(self):
        with pytest.raises(ConvergenceError, match="not contracting at this scale"):
            fixed_point(MoebiusAuto(Vector([0.5])), max_iter=100)

    def test_recenter(self):
        a, recentred = recenter(AffineContracted(0.5, 0.25))
        assert distance(a, 0.5 * basis(1)) <= 1e-11
        assert fixes_origin(recentred, tol=1e-9)

    @pytest.mark.parametrize("symbol", FIX_ZERO_ZOO)
    def test_fixes_origin(self, symbol):
        assert fixes_origin(symbol)

    def test_constant_does_not_fix_origin(self):
        assert not fixes_origin(Constant(Vector([0.2])))


class TestSchwarz:
    @pytest.mark.parametrize("symbol", FIX_ZERO_ZOO)
    @pytest.mark.parametrize("t", [0.3, 0.6, 0.9])
    def test_profile_at_most_one(self, symbol, t):
        samples = SphereSample(t=t, count=200, seed=7).realize()
        assert schwarz_profile(symbol, samples) <= 1.0 + 1e-10

    def test_dilation_profile_is_r(self):
        samples = SphereSample(t=0.5, count=50, seed=3).realize()
        assert schwarz_profile(DiagonalLinear.uniform(0.4), samples) == pytest.approx(0.4, rel=1e-12)

    def test_hypothesis_violated(self):
        with pytest.raises(SymbolError, match="Schwarz hypothesis violated"):
            schwarz_profile(AffineHalf(), PointSet.of([Vector([0.1])]))

    def test_image_radius(self):
        samples = SphereSample(t=0.5, count=100, seed=1).realize()
        assert image_radius(CoordinateSquare(), samples) <= 0.25 + 1e-12
        assert image_radius(DiagonalLinear.uniform(0.5), samples) == pytest.approx(0.25)


class TestStabilityProbe:
    def test_affine_escape(self):
        seeds = PointSet.of([zeros(1, C0)])
        report = stability_probe(AffineHalf(), seeds, 40)
        assert report.escape
        assert not report.ball_stable_evidence
        assert report.to_dict()["kind"] == "evidence"

    def test_affine_escape_past_float_resolution(self):
        seeds = PointSet.of([zeros(1, C0)])
        report = stability_probe(AffineHalf(), seeds, 60)
        assert report.escape
        assert report.reached_boundary
        assert report.sup_norm == 1.0 - 2.0**-53
        assert report.to_dict()["reached_boundary"] is True

    def test_empty_seeds(self):
        with pytest.raises(SpaceError, match="at least one seed"):
            stability_probe(BackwardShift(), PointSet.of([]), 10)

    @pytest.mark.parametrize("r", [0.2, 0.5, 0.8])
    def test_automorphism_orbits_stay_in_rho_ball(self, r, random_ball_vector):
        s = MoebiusAuto(random_ball_vector(8, r))
        seeds = SphereSample(t=r, count=30, seed=11, dim=8).realize()
        report = stability_probe(s, seeds, 12)
        assert report.sup_norm <= rho_bound(r) + 1e-12
        assert not report.reached_boundary

    def test_shift_separation(self):
        seeds = PointSet.of([0.5 * basis(1, space=C0)])
        report = stability_probe(ForwardShift(), seeds, 100)
        assert report.sup_norm == 0.5
        assert report.separation == 0.5
        assert report.ball_stable_evidence
        assert not report.escape

    def test_workers_do_not_change_result(self):
        seeds = SphereSample(t=0.5, count=20, seed=5).realize()
        serial = stability_probe(DiagonalLinear.uniform(0.5), seeds, 10)
        threaded = stability_probe(DiagonalLinear.uniform(0.5), seeds, 10, workers=4)
        assert serial == threaded

    def test_contraction_collapses_separation(self):
        seeds = PointSet.of([Vector([0.5]), Vector([-0.5])])
        report = stability_probe(DiagonalLinear.uniform(0.5), seeds, 60)
        assert report.separation < 1e-15
        assert report.sup_norm == 0.5
