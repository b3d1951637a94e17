import math

import numpy as np
import pytest

from ballerg.exceptions import SingularityError, SpaceError
from ballerg.moebius import AutomorphismParam, alpha, alpha_rows, disc_identity_residual, gamma, rho_bound
from ballerg.spaces import C0, L1, Vector, basis, distance, norm, zeros


class TestAutomorphismParam:
    def test_caches_v(self):
        p = AutomorphismParam.of(Vector([0.6, 0]))
        assert p.v_a == pytest.approx(0.8)

    @pytest.mark.parametrize("a", [Vector([1.0]), Vector([0.8, 0.8])])
    def test_rejects_outside_ball(self, a):
        with pytest.raises(SpaceError):
            AutomorphismParam.of(a)

    @pytest.mark.parametrize("space", [L1, C0])
    def test_requires_hilbert(self, space):
        with pytest.raises(SpaceError, match="inner product requires ℓ₂"):
            AutomorphismParam.of(Vector([0.1], space))


class TestAlpha:
    @pytest.mark.parametrize("dim", [1, 2, 8, 32])
    def test_swaps_zero_and_a(self, dim, random_ball_vector):
        a = random_ball_vector(dim, 0.9)
        p = AutomorphismParam.of(a)
        assert distance(alpha(p, zeros(dim)), a) <= 1e-12
        assert norm(alpha(p, a)) <= 1e-12

    @pytest.mark.parametrize("dim", [1, 2, 8, 32])
    def test_involution(self, dim, random_ball_vector):
        a = random_ball_vector(dim, 0.7)
        for _ in range(20):
            x = random_ball_vector(dim, 0.9)
            assert distance(alpha(a, alpha(a, x)), x) <= 1e-10

    def test_disc_identity(self, random_ball_vector):
        a = random_ball_vector(8, 0.5)
        for _ in range(50):
            assert disc_identity_residual(a, random_ball_vector(8, 0.9)) <= 1e-10

    def test_zero_centre_is_negation(self):
        x = Vector([0.3, -0.2j])
        assert distance(alpha(zeros(2), x), -x) <= 1e-15

    def test_gamma_fixes_a(self):
        a = Vector([0.3, 0.4])
        assert distance(gamma(a, a), a) <= 1e-15

    def test_rejects_boundary_point(self):
        with pytest.raises(SpaceError):
            alpha(Vector([0.5]), basis(1))

    def test_singularity_guard(self):
        # Only a centre outside the ball can make 1 - <x, a> vanish inside it.
        p = AutomorphismParam(Vector([2.0]), 0.0)
        with pytest.raises(SingularityError):
            alpha(p, Vector([0.5]))

    def test_rows_match_vector_form(self, rng):
        a = Vector([0.2, -0.3j, 0.1])
        xs = rng.standard_normal((30, 3)) * 0.2 + 1j * rng.standard_normal((30, 3)) * 0.2
        rows = alpha_rows(a, xs)
        for x, y in zip(xs, rows):
            assert np.allclose(alpha(a, Vector(x)).coords, y, atol=1e-15)


class TestRhoBound:
    @pytest.mark.parametrize("r", [k / 10 for k in range(1, 10)])
    def test_radius_bound(self, r, random_ball_vector, rng):
        rho = rho_bound(r)
        for _ in range(50):
            a = random_ball_vector(8, r * rng.uniform())
            x = random_ball_vector(8, r * rng.uniform())
            assert norm(alpha(a, x)) <= rho + 1e-12

    def test_value(self):
        assert rho_bound(0.5) == pytest.approx(math.sqrt(0.75))
        assert rho_bound(0.0) == 0.0

    @pytest.mark.parametrize("r", [-0.1, 1.0, 2.0])
    def test_rejects_out_of_range(self, r):
        with pytest.raises(ValueError):
            rho_bound(r)
