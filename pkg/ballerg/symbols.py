"""
The zoo of holomorphic self-maps of the unit ball and what we do with them:
iteration, conjugation by alpha_a, Picard fixed points, Schwarz profiles and
orbit-stability reports.

Stability reports only ever carry evidence. A finite set of seeds followed for finitely
many steps cannot certify a statement quantified over all compact or all
ball-bounded sets.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .base_symbol import BaseSymbol
from .config import (
    DEFAULT_DELTA,
    DEFAULT_DIM_CAP,
    FIXED_POINT_MAX_ITER,
    FIXED_POINT_TOL,
    MAX_SEPARATION_POINTS,
    SCHWARZ_ORIGIN_TOL,
)
from .exceptions import ConvergenceError, DimensionCapError, SpaceError, SymbolError
from .moebius import AutomorphismParam, alpha, alpha_rows
from .spaces import L2, PointSet, SpaceKind, Vector, backward_shift_vector, forward_shift_vector, norm, row_norms, zeros


@dataclass(frozen=True)
class ForwardShift(BaseSymbol):
    """(x1, x2, ...) -> (0, x1, x2, ...); grows the stored dimension by one, up to ``dim_cap``."""

    dim_cap: int = DEFAULT_DIM_CAP

    def _map(self, x: Vector) -> Vector:
        shifted = forward_shift_vector(x)
        if shifted.dim > self.dim_cap:
            raise DimensionCapError(f"Forward shift needs {shifted.dim} coordinates, cap is {self.dim_cap}")
        return shifted

    def _map_rows(self, matrix: np.ndarray, space: SpaceKind) -> np.ndarray:
        nonzero = np.flatnonzero(np.any(matrix != 0, axis=0))
        support = int(nonzero[-1]) + 1 if nonzero.size else 0
        width = max(matrix.shape[1], support + 1)
        if width > self.dim_cap:
            raise DimensionCapError(f"Forward shift needs {width} coordinates, cap is {self.dim_cap}")
        result = np.zeros((matrix.shape[0], width), dtype=np.complex128)
        result[:, 1 : support + 1] = matrix[:, :support]
        return result

    @property
    def type_name(self) -> str:
        return "forward_shift"

    @property
    def is_polynomial(self) -> bool:
        return True


@dataclass(frozen=True)
class BackwardShift(BaseSymbol):
    """(x1, x2, ...) -> (x2, x3, ...)."""

    def _map(self, x: Vector) -> Vector:
        return backward_shift_vector(x)

    def _map_rows(self, matrix: np.ndarray, space: SpaceKind) -> np.ndarray:
        if matrix.shape[1] == 1:
            return np.zeros_like(matrix)
        return matrix[:, 1:].copy()

    @property
    def type_name(self) -> str:
        return "backward_shift"

    @property
    def is_polynomial(self) -> bool:
        return True


@dataclass(frozen=True)
class AffineContracted(BaseSymbol):
    """x -> (c x1 + b, 0, 0, ...) with |c| + |b| <= 1 and |b| < 1."""

    c: float
    b: float

    def __post_init__(self):
        if abs(self.c) + abs(self.b) > 1.0 or abs(self.b) >= 1.0:
            raise SymbolError(
                f"Affine map needs |c| + |b| <= 1 and |b| < 1 to preserve the ball, got c={self.c}, b={self.b}"
            )

    def _map(self, x: Vector) -> Vector:
        coords = np.zeros(x.dim, dtype=np.complex128)
        coords[0] = self.c * x.coords[0] + self.b
        return Vector(coords, x.space)

    def _map_rows(self, matrix: np.ndarray, space: SpaceKind) -> np.ndarray:
        result = np.zeros_like(matrix)
        result[:, 0] = self.c * matrix[:, 0] + self.b
        return result

    @property
    def type_name(self) -> str:
        return "affine_contracted"

    @property
    def is_polynomial(self) -> bool:
        return True


@dataclass(frozen=True)
class AffineHalf(AffineContracted):
    """x -> ((x1 + 1) / 2, 0, 0, ...): the map whose orbit of 0 escapes to the sphere."""

    c: float = 0.5
    b: float = 0.5

    def __post_init__(self):
        if (self.c, self.b) != (0.5, 0.5):
            raise SymbolError("AffineHalf is fixed to c = b = 1/2; use AffineContracted for other values")

    @property
    def type_name(self) -> str:
        return "affine_half"


@dataclass(frozen=True)
class CoordinatePower(BaseSymbol):
    """x -> (x_n^m)_n."""

    m: int

    def __post_init__(self):
        if isinstance(self.m, bool) or not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise SymbolError(f"CoordinatePower needs an integer m >= 1, got {self.m!r}")

    def _map(self, x: Vector) -> Vector:
        return Vector(x.coords**self.m, x.space)

    def _map_rows(self, matrix: np.ndarray, space: SpaceKind) -> np.ndarray:
        return matrix**self.m

    @property
    def type_name(self) -> str:
        return "coordinate_power"

    @property
    def is_polynomial(self) -> bool:
        return True


@dataclass(frozen=True)
class CoordinateSquare(CoordinatePower):
    """x -> (x_n^2)_n."""

    m: int = 2

    def __post_init__(self):
        if self.m != 2:
            raise SymbolError("CoordinateSquare is fixed to m = 2; use CoordinatePower for other exponents")

    @property
    def type_name(self) -> str:
        return "coordinate_square"


@dataclass(frozen=True)
class DiagonalLinear(BaseSymbol):
    """x -> (w_n x_n)_n with real |w_n| <= 1.

    Coordinates past the listed weights use ``tail``, which defaults to the
    last listed weight.
    """

    weights: Tuple[float, ...]
    tail: Optional[float] = None

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if not weights:
            raise SymbolError("DiagonalLinear needs at least one weight")
        if self.tail is None:
            object.__setattr__(self, "tail", weights[-1])
        else:
            object.__setattr__(self, "tail", float(self.tail))
        if max(abs(w) for w in weights + (self.tail,)) > 1.0:
            raise SymbolError("DiagonalLinear weights must satisfy |w| <= 1")

    @classmethod
    def uniform(cls, r: float) -> "DiagonalLinear":
        """The dilation x -> r x."""
        return cls((r,), r)

    def weight_vector(self, dim: int) -> np.ndarray:
        """The first ``dim`` diagonal entries."""
        listed = np.array(self.weights[:dim], dtype=float)
        if dim > listed.size:
            listed = np.concatenate([listed, np.full(dim - listed.size, self.tail)])
        return listed

    def _map(self, x: Vector) -> Vector:
        return Vector(x.coords * self.weight_vector(x.dim), x.space)

    def _map_rows(self, matrix: np.ndarray, space: SpaceKind) -> np.ndarray:
        return matrix * self.weight_vector(matrix.shape[1])[None, :]

    @property
    def type_name(self) -> str:
        return "diagonal_linear"

    @property
    def is_polynomial(self) -> bool:
        return True


@dataclass(frozen=True)
class Constant(BaseSymbol):
    """x -> x0 for a fixed x0 in the open ball."""

    point: Vector

    def __post_init__(self):
        if norm(self.point) >= 1.0:
            raise SymbolError("Constant symbol needs a point of the open ball")

    def _map(self, x: Vector) -> Vector:
        if x.space != self.point.space:
            raise SpaceError(f"Constant symbol lives in {self.point.space}, got a point of {x.space}")
        return self.point

    def _map_rows(self, matrix: np.ndarray, space: SpaceKind) -> np.ndarray:
        if space != self.point.space:
            raise SpaceError(f"Constant symbol lives in {self.point.space}, got points of {space}")
        return np.tile(self.point.coords, (matrix.shape[0], 1))

    @property
    def type_name(self) -> str:
        return "constant"

    @property
    def is_polynomial(self) -> bool:
        return True

    @property
    def preferred_space(self) -> SpaceKind:
        return self.point.space


@dataclass(frozen=True)
class MoebiusAuto(BaseSymbol):
    """The involutive automorphism alpha_a of the Hilbert ball."""

    a: Vector
    param: AutomorphismParam = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        try:
            object.__setattr__(self, "param", AutomorphismParam.of(self.a))
        except SpaceError as e:
            raise SymbolError(str(e)) from e

    def _map(self, x: Vector) -> Vector:
        return alpha(self.param, x)

    def _map_rows(self, matrix: np.ndarray, space: SpaceKind) -> np.ndarray:
        return alpha_rows(self.param, matrix)

    @property
    def type_name(self) -> str:
        return "moebius"

    @property
    def is_polynomial(self) -> bool:
        return False


@dataclass(frozen=True)
class Conjugated(BaseSymbol):
    """alpha_a o inner o alpha_a."""

    a: Vector
    inner: BaseSymbol
    param: AutomorphismParam = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        try:
            object.__setattr__(self, "param", AutomorphismParam.of(self.a))
        except SpaceError as e:
            raise SymbolError(str(e)) from e

    def _map(self, x: Vector) -> Vector:
        return alpha(self.param, self.inner.apply(alpha(self.param, x)))

    def _map_rows(self, matrix: np.ndarray, space: SpaceKind) -> np.ndarray:
        return alpha_rows(self.param, self.inner.apply_rows(alpha_rows(self.param, matrix), space))

    @property
    def type_name(self) -> str:
        return "conjugated"

    @property
    def is_polynomial(self) -> bool:
        return False


@dataclass(frozen=True)
class Composite(BaseSymbol):
    """Applies ``parts`` in list order: parts[0] first."""

    parts: Tuple[BaseSymbol, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise SymbolError("Composite needs at least one part")

    def _map(self, x: Vector) -> Vector:
        for part in self.parts:
            x = part.apply(x)
        return x

    def _map_rows(self, matrix: np.ndarray, space: SpaceKind) -> np.ndarray:
        for part in self.parts:
            matrix = part.apply_rows(matrix, space)
        return matrix

    @property
    def type_name(self) -> str:
        return "composite"

    @property
    def is_polynomial(self) -> bool:
        return all(part.is_polynomial for part in self.parts)

    @property
    def preferred_space(self) -> SpaceKind:
        for part in self.parts:
            if isinstance(part, Constant):
                return part.preferred_space
        return L2


@dataclass(frozen=True)
class Orbit:
    """The points x, phi(x), ..., phi^n(x) with their norms."""

    start: Vector
    points: Tuple[Vector, ...]
    norms: Tuple[float, ...]
    # Set when the next iterate rounded onto the unit sphere and the orbit was cut there.
    reached_boundary: bool = False

    @property
    def length(self) -> int:
        return len(self.points)

    @property
    def last(self) -> Vector:
        return self.points[-1]


@dataclass(frozen=True)
class StabilityReport:
    """Evidence about the orbits of a symbol from finitely many seeds and steps."""

    symbol: str
    seed_count: int
    n_max: int
    delta: float
    sup_norm: float
    separation: float
    separation_sampled: bool
    escape: bool
    reached_boundary: bool = False
    kind: str = "evidence"

    @property
    def ball_stable_evidence(self) -> bool:
        """True when every orbit point stayed inside (1 - delta) B."""
        return self.sup_norm <= 1.0 - self.delta

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "symbol": self.symbol,
            "seed_count": self.seed_count,
            "n_max": self.n_max,
            "delta": self.delta,
            "sup_norm": self.sup_norm,
            "ball_stable_evidence": self.ball_stable_evidence,
            "separation": self.separation,
            "separation_sampled": self.separation_sampled,
            "escape": self.escape,
            "reached_boundary": self.reached_boundary,
        }


def apply(s: BaseSymbol, x: Vector) -> Vector:
    """Image of ``x`` under ``s``."""
    return s.apply(x)


def iterate(s: BaseSymbol, x: Vector, n: int, stop_at_boundary: bool = False) -> Orbit:
    """Orbit x, s(x), ..., s^n(x).

    An orbit creeping towards the sphere eventually produces an iterate whose
    norm rounds to 1. That raises SpaceError, unless ``stop_at_boundary`` is set,
    in which case the orbit ends at the last point inside the ball and is
    flagged with ``reached_boundary``.
    """
    if n < 0:
        raise ValueError(f"iterate needs n >= 0, got {n}")
    points: List[Vector] = [x]
    norms: List[float] = [norm(x)]
    reached_boundary = False
    for step in range(1, n + 1):
        image = s.apply(points[-1])
        size = norm(image)
        if size >= 1.0:
            if not stop_at_boundary:
                raise SpaceError(f"{s.type_name} left the open ball in floating point at step {step}")
            reached_boundary = True
            break
        points.append(image)
        norms.append(size)
    return Orbit(start=x, points=tuple(points), norms=tuple(norms), reached_boundary=reached_boundary)


def conjugate(a: Vector, s: BaseSymbol) -> Conjugated:
    """alpha_a o s o alpha_a; requires a in the open ball of l_2."""
    if not a.space.is_hilbert:
        raise SpaceError("inner product requires ℓ₂")
    return Conjugated(a, s)


def fixes_origin(s: BaseSymbol, space: Optional[SpaceKind] = None, tol: float = SCHWARZ_ORIGIN_TOL) -> bool:
    return norm(s.apply(zeros(1, space or s.preferred_space))) <= tol


def fixed_point(
    s: BaseSymbol,
    tol: float = FIXED_POINT_TOL,
    max_iter: int = FIXED_POINT_MAX_ITER,
    space: Optional[SpaceKind] = None,
) -> Vector:
    """Picard iteration from 0 until consecutive iterates are closer than ``tol``."""
    if tol <= 0:
        raise ValueError(f"fixed_point needs tol > 0, got {tol}")
    x = zeros(1, space or s.preferred_space)
    for _ in range(max_iter):
        nxt = s.apply(x)
        if norm(nxt - x) < tol:
            return nxt
        x = nxt
    raise ConvergenceError(
        f"not contracting at this scale: {s.type_name} did not settle within {max_iter} Picard steps"
    )


def recenter(
    s: BaseSymbol, tol: float = FIXED_POINT_TOL, max_iter: int = FIXED_POINT_MAX_ITER
) -> Tuple[Vector, Conjugated]:
    """Fixed point a of ``s`` and the conjugate alpha_a o s o alpha_a, which fixes 0."""
    a = fixed_point(s, tol=tol, max_iter=max_iter, space=L2)
    return a, conjugate(a, s)


def image_radius(s: BaseSymbol, samples: PointSet) -> float:
    """Largest image norm over the samples: an empirical rho with s(samples) inside rho B."""
    return max(norm(s.apply(x)) for x in samples)


def schwarz_profile(s: BaseSymbol, samples: PointSet) -> float:
    """max |s(x)| / |x| over the nonzero samples; s must fix the origin."""
    if not fixes_origin(s, samples.space):
        raise SymbolError("Schwarz hypothesis violated: the symbol does not fix 0")
    ratios = [norm(s.apply(x)) / size for x in samples if (size := norm(x)) > 0.0]
    return max(ratios, default=0.0)


def _min_separation(points: Sequence[Vector], space: SpaceKind) -> Tuple[float, bool]:
    sampled = len(points) > MAX_SEPARATION_POINTS
    if sampled:
        picks = np.linspace(0, len(points) - 1, MAX_SEPARATION_POINTS).round().astype(int)
        points = [points[i] for i in picks]
    if len(points) < 2:
        return float("inf"), sampled
    matrix = PointSet.of(points).as_matrix()
    best = float("inf")
    for i in range(len(points) - 1):
        gaps = row_norms(matrix[i + 1 :] - matrix[i], space)
        best = min(best, float(gaps.min()))
        if best == 0.0:
            break
    return best, sampled


def _is_escaping(orbit: Orbit, delta: float) -> bool:
    steps = np.diff(orbit.norms)
    return orbit.length > 1 and bool(np.all(steps > 0)) and orbit.norms[-1] > 1.0 - delta


def stability_probe(
    s: BaseSymbol,
    seeds: PointSet,
    n_max: int,
    delta: float = DEFAULT_DELTA,
    workers: int = 1,
) -> StabilityReport:
    """Follow every seed for n_max steps and summarise boundedness, separation and escape.

    Orbits that round onto the unit sphere are cut there and count as escaping.
    """
    if len(seeds) == 0:
        raise SpaceError("stability_probe needs at least one seed")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            orbits = list(pool.map(lambda seed: iterate(s, seed, n_max, stop_at_boundary=True), seeds))
    else:
        orbits = [iterate(s, seed, n_max, stop_at_boundary=True) for seed in seeds]

    union = [p for orbit in orbits for p in orbit.points]
    separation, sampled = _min_separation(union, seeds.space or s.preferred_space)
    return StabilityReport(
        symbol=s.type_name,
        seed_count=len(seeds),
        n_max=n_max,
        delta=delta,
        sup_norm=max(max(orbit.norms) for orbit in orbits),
        separation=separation,
        separation_sampled=sampled,
        escape=any(orbit.reached_boundary or _is_escaping(orbit, delta) for orbit in orbits),
        reached_boundary=any(orbit.reached_boundary for orbit in orbits),
    )
