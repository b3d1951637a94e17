"""
Truncated sequence-space vectors.

Points of the unit ball of c0 or l_p are modelled by finitely many complex
coordinates; everything past the stored coordinates reads as zero. Two vectors
that differ only by trailing zeros are equal.
"""
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import SpaceError

P_INF = "inf"

Number = Union[int, float, complex]


@dataclass(frozen=True)
class SpaceKind:
    """Ambient sequence space: l_p for 1 <= p <= inf, or c0.

    ``p`` is a float for finite exponents and the ``P_INF`` sentinel for l_inf.
    """

    tag: str
    p: Union[float, str, None] = None

    def __post_init__(self):
        if self.tag == "c0":
            if self.p is not None:
                raise SpaceError("c0 takes no exponent")
        elif self.tag == "lp":
            if self.p != P_INF:
                if not isinstance(self.p, (int, float)) or isinstance(self.p, bool):
                    raise SpaceError(f"l_p exponent must be a number or {P_INF!r}, got {self.p!r}")
                if self.p == float("inf"):
                    object.__setattr__(self, "p", P_INF)
                elif self.p < 1:
                    raise SpaceError(f"l_p exponent must satisfy p >= 1, got {self.p}")
                else:
                    object.__setattr__(self, "p", float(self.p))
        else:
            raise SpaceError(f"Unknown space tag {self.tag!r}")

    @classmethod
    def lp(cls, p: Union[float, str]) -> "SpaceKind":
        return cls("lp", p)

    @classmethod
    def c0(cls) -> "SpaceKind":
        return cls("c0")

    @property
    def is_sup(self) -> bool:
        """True when the norm is the supremum norm (c0 and l_inf)."""
        return self.tag == "c0" or self.p == P_INF

    @property
    def is_hilbert(self) -> bool:
        return self.tag == "lp" and self.p == 2.0

    def __str__(self) -> str:
        if self.tag == "c0":
            return "c0"
        if self.p == P_INF:
            return "l_inf"
        return f"l_{self.p:g}"


L2 = SpaceKind.lp(2)
L1 = SpaceKind.lp(1)
C0 = SpaceKind.c0()


class Vector:
    """Immutable finite complex sequence living in a given SpaceKind."""

    __slots__ = ("_coords", "_space")

    def __init__(self, coords: Iterable[Number], space: SpaceKind = L2):
        arr = np.array(list(coords) if not isinstance(coords, np.ndarray) else coords, dtype=np.complex128)
        arr = arr.ravel().copy()
        if arr.size == 0:
            raise SpaceError("A vector needs at least one coordinate")
        if not np.all(np.isfinite(arr)):
            raise SpaceError("Vector coordinates must be finite")
        arr.setflags(write=False)
        self._coords = arr
        self._space = space

    @property
    def coords(self) -> np.ndarray:
        """Read-only complex coordinate array."""
        return self._coords

    @property
    def dim(self) -> int:
        return int(self._coords.size)

    @property
    def space(self) -> SpaceKind:
        return self._space

    @property
    def support(self) -> int:
        """One-based index of the last nonzero coordinate (0 for the zero vector)."""
        nonzero = np.flatnonzero(self._coords)
        return int(nonzero[-1]) + 1 if nonzero.size else 0

    def padded(self, dim: int) -> "Vector":
        """Return the same point stored with at least ``dim`` coordinates."""
        if dim <= self.dim:
            return self
        return Vector(np.concatenate([self._coords, np.zeros(dim - self.dim, dtype=np.complex128)]), self._space)

    def trimmed(self) -> "Vector":
        """Drop trailing zeros, keeping at least one coordinate."""
        keep = max(self.support, 1)
        if keep == self.dim:
            return self
        return Vector(self._coords[:keep], self._space)

    def with_space(self, space: SpaceKind) -> "Vector":
        return Vector(self._coords, space)

    def _aligned(self, other: "Vector") -> Tuple[np.ndarray, np.ndarray]:
        if not isinstance(other, Vector):
            raise TypeError(f"Expected a Vector, got {type(other).__name__}")
        if other.space != self.space:
            raise SpaceError(f"Cannot combine vectors from {self.space} and {other.space}")
        dim = max(self.dim, other.dim)
        return self.padded(dim).coords, other.padded(dim).coords

    def __add__(self, other: "Vector") -> "Vector":
        a, b = self._aligned(other)
        return Vector(a + b, self._space)

    def __sub__(self, other: "Vector") -> "Vector":
        a, b = self._aligned(other)
        return Vector(a - b, self._space)

    def __neg__(self) -> "Vector":
        return Vector(-self._coords, self._space)

    def __mul__(self, scalar: Number) -> "Vector":
        if isinstance(scalar, Vector):
            return NotImplemented
        return Vector(self._coords * scalar, self._space)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Number) -> "Vector":
        return Vector(self._coords / scalar, self._space)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vector):
            return NotImplemented
        if other.space != self.space:
            return False
        a, b = self._aligned(other)
        return bool(np.array_equal(a, b))

    def __hash__(self) -> int:
        return hash((self._space, tuple(self.trimmed().coords.tolist())))

    def __repr__(self) -> str:
        coords = ", ".join(_format_complex(z) for z in self._coords[:6])
        more = ", ..." if self.dim > 6 else ""
        return f"Vector([{coords}{more}], dim={self.dim}, space={self._space})"


def _format_complex(z: complex) -> str:
    if z.imag == 0:
        return f"{z.real:g}"
    return f"{z.real:g}{z.imag:+g}j"


def zeros(dim: int, space: SpaceKind = L2) -> Vector:
    return Vector(np.zeros(dim, dtype=np.complex128), space)


def basis(n: int, dim: Optional[int] = None, space: SpaceKind = L2) -> Vector:
    """The unit vector e_n (one-based), stored with ``dim`` coordinates (default n)."""
    if n < 1:
        raise SpaceError(f"Basis vectors are one-based, got e_{n}")
    dim = n if dim is None else dim
    if dim < n:
        raise SpaceError(f"e_{n} does not fit into {dim} coordinates")
    coords = np.zeros(dim, dtype=np.complex128)
    coords[n - 1] = 1.0
    return Vector(coords, space)


def norm(v: Vector) -> float:
    """The ambient norm: (sum |v_i|^p)^(1/p) for finite p, sup |v_i| for l_inf and c0."""
    mags = np.abs(v.coords)
    top = float(mags.max())
    if top == 0.0:
        return 0.0
    if v.space.is_sup:
        return top
    p = v.space.p
    if p == 1.0:
        return float(mags.sum())
    # Scaling by the largest coordinate keeps single-support vectors exact and avoids overflow.
    scaled = mags / top
    if p == 2.0:
        return top * float(np.sqrt(np.sum(scaled * scaled)))
    return top * float(np.sum(scaled**p) ** (1.0 / p))


def inner(x: Vector, a: Vector) -> complex:
    """Hilbert pairing sum x_i * conj(a_i); linear in x, conjugate-linear in a."""
    if not (x.space.is_hilbert and a.space.is_hilbert):
        raise SpaceError("inner product requires ℓ₂")
    dim = max(x.dim, a.dim)
    return complex(np.vdot(a.padded(dim).coords, x.padded(dim).coords))


def distance(x: Vector, y: Vector) -> float:
    return norm(x - y)


def in_open_ball(v: Vector, radius: float = 1.0) -> bool:
    return norm(v) < radius


def forward_shift_vector(v: Vector) -> Vector:
    """(x1, x2, ...) -> (0, x1, x2, ...) on the whole space, dropping trailing zeros first."""
    body = v.coords[: max(v.support, 1)]
    shifted = np.concatenate([np.zeros(1, dtype=np.complex128), body])
    return Vector(shifted, v.space).padded(v.dim)


def backward_shift_vector(v: Vector) -> Vector:
    """(x1, x2, ...) -> (x2, x3, ...) on the whole space."""
    if v.dim == 1:
        return zeros(1, v.space)
    return Vector(v.coords[1:], v.space)


@dataclass(frozen=True)
class PointSet:
    """A finite set of points standing in for a compact set or a ball-bounded set."""

    points: Tuple[Vector, ...]
    label: str = ""
    _matrix_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        points = tuple(self.points)
        object.__setattr__(self, "points", points)
        spaces = {p.space for p in points}
        if len(spaces) > 1:
            raise SpaceError(f"PointSet {self.label!r} mixes spaces: {', '.join(sorted(map(str, spaces)))}")

    @classmethod
    def of(cls, points: Sequence[Vector], label: str = "") -> "PointSet":
        return cls(tuple(points), label)

    @property
    def space(self) -> Optional[SpaceKind]:
        return self.points[0].space if self.points else None

    @property
    def max_dim(self) -> int:
        return max((p.dim for p in self.points), default=0)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Vector]:
        return iter(self.points)

    def as_matrix(self, dim: Optional[int] = None) -> np.ndarray:
        """Points stacked as rows of a zero-padded complex matrix with at least ``dim`` columns."""
        width = max(self.max_dim, dim or 0, 1)
        cached = self._matrix_cache.get(width)
        if cached is not None:
            return cached
        matrix = np.zeros((len(self.points), width), dtype=np.complex128)
        for row, point in enumerate(self.points):
            matrix[row, : point.dim] = point.coords
        matrix.setflags(write=False)
        self._matrix_cache[width] = matrix
        return matrix


def ball_margin(s: PointSet) -> float:
    """1 - max norm over the set; a positive margin certifies the set is ball-bounded."""
    if len(s) == 0:
        raise SpaceError("ball_margin needs a nonempty point set")
    return 1.0 - max(norm(p) for p in s)


def row_norms(matrix: np.ndarray, space: SpaceKind) -> np.ndarray:
    """Ambient norm of every row of a coordinate matrix, computed like ``norm``."""
    mags = np.abs(matrix)
    if mags.shape[1] == 0:
        return np.zeros(mags.shape[0])
    top = mags.max(axis=1)
    if space.is_sup:
        return top
    if space.p == 1.0:
        return mags.sum(axis=1)
    safe = np.where(top > 0, top, 1.0)
    scaled = mags / safe[:, None]
    if space.p == 2.0:
        result = safe * np.sqrt(np.sum(scaled * scaled, axis=1))
    else:
        result = safe * np.sum(scaled**space.p, axis=1) ** (1.0 / space.p)
    return np.where(top > 0, result, 0.0)
