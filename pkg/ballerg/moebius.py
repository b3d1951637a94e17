"""
Automorphisms of the Hilbert ball.

For a in the open unit ball of l_2, gamma_a is the linear map
``x -> a <x, a> / (1 + v(a)) + v(a) x`` with ``v(a) = sqrt(1 - |a|^2)`` and
alpha_a is the involutive automorphism ``x -> gamma_a((a - x) / (1 - <x, a>))``
swapping 0 and a.
"""
import math
from dataclasses import dataclass

import numpy as np

from .config import SINGULARITY_GUARD
from .exceptions import SingularityError, SpaceError
from .spaces import Vector, inner, norm


@dataclass(frozen=True)
class AutomorphismParam:
    """The centre a of an automorphism together with the cached v(a)."""

    a: Vector
    v_a: float

    @classmethod
    def of(cls, a: Vector) -> "AutomorphismParam":
        if not a.space.is_hilbert:
            raise SpaceError("inner product requires ℓ₂")
        size = norm(a)
        if size >= 1.0:
            raise SpaceError(f"Automorphism centre must lie in the open ball, got norm {size}")
        return cls(a, math.sqrt(1.0 - size * size))


def _param(p) -> AutomorphismParam:
    return p if isinstance(p, AutomorphismParam) else AutomorphismParam.of(p)


def gamma(p: AutomorphismParam, x: Vector) -> Vector:
    """gamma_a(x) = a <x, a> / (1 + v(a)) + v(a) x."""
    p = _param(p)
    if not x.space.is_hilbert:
        raise SpaceError("inner product requires ℓ₂")
    dim = max(x.dim, p.a.dim)
    a = p.a.padded(dim).coords
    xs = x.padded(dim).coords
    pairing = np.vdot(a, xs)
    return Vector(a * (pairing / (1.0 + p.v_a)) + p.v_a * xs, x.space)


def alpha(p: AutomorphismParam, x: Vector) -> Vector:
    """alpha_a(x) = gamma_a((a - x) / (1 - <x, a>))."""
    p = _param(p)
    if norm(x) >= 1.0:
        raise SpaceError("alpha_a is only defined on the open unit ball")
    denominator = 1.0 - inner(x, p.a)
    if abs(denominator) < SINGULARITY_GUARD:
        raise SingularityError(f"|1 - <x, a>| = {abs(denominator):.3e} is below the singularity guard")
    return gamma(p, (p.a.padded(x.dim) - x) / denominator)


def rho_bound(r: float) -> float:
    """Radius rho with alpha_a(rB) inside rho B for every |a| <= r: sqrt(1 - (1 - r)^2)."""
    if not 0.0 <= r < 1.0:
        raise ValueError(f"rho_bound needs 0 <= r < 1, got {r}")
    return math.sqrt(1.0 - (1.0 - r) ** 2)


def disc_identity_residual(p: AutomorphismParam, x: Vector) -> float:
    """|(1 - |y|^2) - (1 - |a|^2)(1 - |x|^2) / |1 - <x, a>|^2| for y = alpha_a(x)."""
    p = _param(p)
    y = alpha(p, x)
    lhs = 1.0 - norm(y) ** 2
    rhs = (1.0 - norm(p.a) ** 2) * (1.0 - norm(x) ** 2) / abs(1.0 - inner(x, p.a)) ** 2
    return abs(lhs - rhs)


def alpha_rows(p: AutomorphismParam, matrix: np.ndarray) -> np.ndarray:
    """alpha_a applied to every row of a zero-padded coordinate matrix."""
    p = _param(p)
    dim = max(matrix.shape[1], p.a.dim)
    xs = np.zeros((matrix.shape[0], dim), dtype=np.complex128)
    xs[:, : matrix.shape[1]] = matrix
    a = p.a.padded(dim).coords
    denominator = 1.0 - xs @ np.conj(a)
    if np.any(np.abs(denominator) < SINGULARITY_GUARD):
        raise SingularityError("|1 - <x, a>| fell below the singularity guard")
    ys = (a[None, :] - xs) / denominator[:, None]
    pairing = ys @ np.conj(a)
    return np.outer(pairing / (1.0 + p.v_a), a) + p.v_a * ys
