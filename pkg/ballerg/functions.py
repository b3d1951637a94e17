"""
Sparse multi-index polynomials standing in for holomorphic functions on the ball.

Coordinates are one-based: ``x_1`` is the first coordinate. A PolyFn keeps a
canonical map from MultiIndex to nonzero complex coefficient, so equality of
polynomials is equality of term maps.
"""
import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property, reduce, singledispatch
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

import numpy as np

from .base_symbol import BaseSymbol
from .config import DEFAULT_DIM, HULL_TOL
from .exceptions import CompositionUnavailableError, DictionaryError, SpaceError
from .spaces import L2, PointSet, SpaceKind, Vector, row_norms
from .symbols import (
    AffineContracted,
    BackwardShift,
    Composite,
    Constant,
    CoordinatePower,
    DiagonalLinear,
    ForwardShift,
)

Scalar = Union[int, float, complex]


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Finitely supported exponent map, stored as sorted (index, power) pairs with power > 0."""

    exponents: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        pairs = tuple(sorted((int(i), int(p)) for i, p in self.exponents if int(p) != 0))
        for index, power in pairs:
            if index < 1:
                raise ValueError(f"Coordinate indices are one-based, got {index}")
            if power < 0:
                raise ValueError(f"Exponents must be non-negative, got {power}")
        if len({i for i, _ in pairs}) != len(pairs):
            raise ValueError(f"Repeated coordinate in multi-index {pairs}")
        object.__setattr__(self, "exponents", pairs)

    @classmethod
    def of(cls, exponents: Mapping[int, int]) -> "MultiIndex":
        return cls(tuple(exponents.items()))

    @property
    def degree(self) -> int:
        return sum(p for _, p in self.exponents)

    @property
    def max_index(self) -> int:
        """Largest coordinate with a nonzero exponent (0 for the constant monomial)."""
        return self.exponents[-1][0] if self.exponents else 0

    @property
    def min_index(self) -> int:
        return self.exponents[0][0] if self.exponents else 0

    def power_of(self, index: int) -> int:
        return dict(self.exponents).get(index, 0)

    def shifted(self, offset: int) -> "MultiIndex":
        return MultiIndex(tuple((i + offset, p) for i, p in self.exponents))

    def scaled(self, factor: int) -> "MultiIndex":
        return MultiIndex(tuple((i, p * factor) for i, p in self.exponents))

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        merged = dict(self.exponents)
        for i, p in other.exponents:
            merged[i] = merged.get(i, 0) + p
        return MultiIndex.of(merged)

    def as_dict(self) -> Dict[int, int]:
        return dict(self.exponents)

    def __str__(self) -> str:
        if not self.exponents:
            return "1"
        return "*".join(f"x{i}" if p == 1 else f"x{i}^{p}" for i, p in self.exponents)


ONE = MultiIndex()


class PolyFn:
    """Immutable sparse polynomial sum c_alpha x^alpha."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[MultiIndex, Scalar]] = None):
        clean: Dict[MultiIndex, complex] = {}
        for index, coeff in (terms or {}).items():
            value = complex(coeff)
            if value != 0:
                clean[index] = value
        self._terms = MappingProxyType(dict(sorted(clean.items())))

    @classmethod
    def zero(cls) -> "PolyFn":
        return cls()

    @classmethod
    def constant(cls, c: Scalar) -> "PolyFn":
        return cls({ONE: c})

    @classmethod
    def coordinate(cls, i: int) -> "PolyFn":
        return cls({MultiIndex(((i, 1),)): 1.0})

    @classmethod
    def monomial(cls, exponents: Mapping[int, int], coeff: Scalar = 1.0) -> "PolyFn":
        return cls({MultiIndex.of(exponents): coeff})

    @property
    def terms(self) -> Mapping[MultiIndex, complex]:
        return self._terms

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        return max((index.degree for index in self._terms), default=0)

    @property
    def max_index(self) -> int:
        return max((index.max_index for index in self._terms), default=0)

    def __add__(self, other: Union["PolyFn", Scalar]) -> "PolyFn":
        other = other if isinstance(other, PolyFn) else PolyFn.constant(other)
        merged = dict(self._terms)
        for index, coeff in other.terms.items():
            merged[index] = merged.get(index, 0) + coeff
        return PolyFn(merged)

    __radd__ = __add__

    def __neg__(self) -> "PolyFn":
        return PolyFn({index: -coeff for index, coeff in self._terms.items()})

    def __sub__(self, other: Union["PolyFn", Scalar]) -> "PolyFn":
        other = other if isinstance(other, PolyFn) else PolyFn.constant(other)
        return self + (-other)

    def __mul__(self, other: Union["PolyFn", Scalar]) -> "PolyFn":
        if not isinstance(other, PolyFn):
            return PolyFn({index: coeff * other for index, coeff in self._terms.items()})
        product: Dict[MultiIndex, complex] = {}
        for (i1, c1), (i2, c2) in itertools.product(self._terms.items(), other.terms.items()):
            index = i1 + i2
            product[index] = product.get(index, 0) + c1 * c2
        return PolyFn(product)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Scalar) -> "PolyFn":
        return self * (1.0 / scalar)

    def __pow__(self, k: int) -> "PolyFn":
        if k < 0:
            raise ValueError("Polynomials only take non-negative integer powers")
        result = PolyFn.constant(1.0)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyFn):
            return NotImplemented
        return dict(self._terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        if self.is_zero:
            return "PolyFn(0)"
        body = " + ".join(f"({c:g})*{index}" for index, c in self._terms.items())
        return f"PolyFn({body})"


def evaluate_matrix(f: PolyFn, matrix: np.ndarray) -> np.ndarray:
    """Values of ``f`` at every row of a zero-padded coordinate matrix."""
    count, width = matrix.shape
    real = not np.any(matrix.imag)
    columns = matrix.real if real else matrix
    powers: Dict[Tuple[int, int], np.ndarray] = {}
    total = np.zeros(count, dtype=np.complex128)
    for index, coeff in f.terms.items():
        if index.max_index > width:
            # A coordinate beyond the stored ones reads as 0, so the monomial vanishes.
            continue
        value = np.ones(count, dtype=columns.dtype)
        for i, p in index.exponents:
            key = (i, p)
            if key not in powers:
                powers[key] = np.power(columns[:, i - 1], float(p) if real else p)
            value = value * powers[key]
        total = total + coeff * value
    return total


def evaluate(f: PolyFn, x: Vector) -> complex:
    """f(x); coordinates beyond dim(x) read as 0."""
    return complex(evaluate_matrix(f, x.coords.reshape(1, -1))[0])


def evaluate_points(f: PolyFn, points: PointSet) -> np.ndarray:
    return evaluate_matrix(f, points.as_matrix(f.max_index))


class SeminormSpec(ABC):
    """A finite point set standing in for a compact set or a ball tB."""

    @abstractmethod
    def realize(self) -> PointSet:
        """Return the concrete points the seminorm takes its supremum over."""
        pass

    @property
    @abstractmethod
    def label(self) -> str:
        """Return a short human-readable description."""
        pass

    @abstractmethod
    def to_dict(self) -> dict:
        """Return a JSON-friendly description including any seed."""
        pass


@dataclass(frozen=True)
class ExplicitPoints(SeminormSpec):
    points: PointSet

    def realize(self) -> PointSet:
        return self.points

    @property
    def label(self) -> str:
        return self.points.label or f"{len(self.points)} explicit points"

    def to_dict(self) -> dict:
        return {"mode": "explicit", "label": self.label, "count": len(self.points)}

    @classmethod
    def mapped(cls, spec: SeminormSpec, s: BaseSymbol, label: str = "") -> "ExplicitPoints":
        """The image of a spec's points under a symbol, e.g. an alpha_a-transported spec."""
        source = spec.realize()
        return cls(PointSet.of([s.apply(x) for x in source], label or f"{s.type_name}({source.label})"))


@dataclass(frozen=True)
class SphereSample(SeminormSpec):
    """``count`` points of norm t in ``dim`` coordinates with random directions and phases.

    Point i is drawn from its own stream seeded by (seed, i), so the sample is
    independent of evaluation order.
    """

    t: float
    count: int
    seed: int
    dim: int = DEFAULT_DIM
    space: SpaceKind = L2

    def __post_init__(self):
        if not 0.0 < self.t < 1.0:
            raise SpaceError(f"SphereSample radius must lie in (0, 1), got {self.t}")
        if self.count < 1 or self.dim < 1:
            raise SpaceError("SphereSample needs count >= 1 and dim >= 1")
        if self.seed < 0:
            raise SpaceError(f"SphereSample seed must be non-negative, got {self.seed}")

    @cached_property
    def _points(self) -> PointSet:
        raw = np.empty((self.count, self.dim), dtype=np.complex128)
        for i in range(self.count):
            rng = np.random.default_rng([self.seed, i])
            raw[i] = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        raw *= (self.t / row_norms(raw, self.space))[:, None]
        return PointSet.of([Vector(row, self.space) for row in raw], self.label)

    def realize(self) -> PointSet:
        return self._points

    @property
    def label(self) -> str:
        return f"sphere(t={self.t:g}, count={self.count}, seed={self.seed}, dim={self.dim}, {self.space})"

    def to_dict(self) -> dict:
        return {
            "mode": "sphere",
            "t": self.t,
            "count": self.count,
            "seed": self.seed,
            "dim": self.dim,
            "space": str(self.space),
        }


def seminorm(f: PolyFn, spec: SeminormSpec) -> float:
    """sup |f(x)| over the realized points of ``spec``."""
    if f.is_zero:
        return 0.0
    return float(np.max(np.abs(evaluate_points(f, spec.realize()))))


@dataclass(frozen=True)
class Dictionary:
    """Labelled test functions with their recorded sup-norm estimates."""

    entries: Tuple[Tuple[str, PolyFn], ...]
    normalization: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        entries = tuple((str(label), f) for label, f in self.entries)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "normalization", MappingProxyType(dict(self.normalization)))
        labels = [label for label, _ in entries]
        if len(set(labels)) != len(labels):
            raise DictionaryError("Dictionary labels must be unique")

    def __hash__(self) -> int:
        return hash(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Tuple[str, PolyFn]]:
        return iter(self.entries)

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(label for label, _ in self.entries)

    def normalized(self, spec: SeminormSpec) -> "Dictionary":
        """Scale every entry to sampled sup 1 over ``spec``; zero entries stay zero."""
        scaled = []
        record = {}
        for label, f in self.entries:
            size = seminorm(f, spec)
            g = f / size if size > 0 else f
            scaled.append((label, g))
            record[label] = seminorm(g, spec)
        return Dictionary(tuple(scaled), record)

    def is_normalized(self, tol: float) -> bool:
        return all(self.normalization.get(label, float("inf")) <= 1.0 + tol for label in self.labels)


def coordinate_dictionary(dim: int) -> Dictionary:
    return Dictionary(tuple((f"x{i}", PolyFn.coordinate(i)) for i in range(1, dim + 1)))


def monomial_dictionary(dim: int, max_degree: int, include_constant: bool = True) -> Dictionary:
    """All monomials in x1..x_dim of degree at most ``max_degree``."""
    entries = []
    for degree in range(0 if include_constant else 1, max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(1, dim + 1), degree):
            counts: Dict[int, int] = {}
            for i in combo:
                counts[i] = counts.get(i, 0) + 1
            index = MultiIndex.of(counts)
            entries.append((str(index), PolyFn({index: 1.0})))
    return Dictionary(tuple(entries))


@singledispatch
def _substitute(s: BaseSymbol, f: PolyFn) -> PolyFn:
    raise CompositionUnavailableError("exact composition unavailable; use pointwise")


@_substitute.register
def _(s: ForwardShift, f: PolyFn) -> PolyFn:
    # (Fx)_1 = 0 kills every monomial touching x1; otherwise x_i becomes x_{i-1}.
    return PolyFn({index.shifted(-1): c for index, c in f.terms.items() if index.power_of(1) == 0})


@_substitute.register
def _(s: BackwardShift, f: PolyFn) -> PolyFn:
    return PolyFn({index.shifted(1): c for index, c in f.terms.items()})


@_substitute.register
def _(s: CoordinatePower, f: PolyFn) -> PolyFn:
    return PolyFn({index.scaled(s.m): c for index, c in f.terms.items()})


@_substitute.register
def _(s: DiagonalLinear, f: PolyFn) -> PolyFn:
    weights = s.weight_vector(max(f.max_index, 1))
    return PolyFn(
        {index: c * np.prod([weights[i - 1] ** p for i, p in index.exponents]) for index, c in f.terms.items()}
    )


@_substitute.register
def _(s: AffineContracted, f: PolyFn) -> PolyFn:
    image = PolyFn.coordinate(1) * s.c + s.b
    result = PolyFn.zero()
    for index, c in f.terms.items():
        if index.max_index > 1:
            continue
        result = result + (image ** index.power_of(1)) * c
    return result


@_substitute.register
def _(s: Constant, f: PolyFn) -> PolyFn:
    return PolyFn.constant(evaluate(f, s.point))


@_substitute.register
def _(s: Composite, f: PolyFn) -> PolyFn:
    # f o (p_k o ... o p_1): substitute the last applied part first.
    return reduce(lambda g, part: compose_exact(g, part), reversed(s.parts), f)


def compose_exact(f: PolyFn, s: BaseSymbol) -> PolyFn:
    """The polynomial f o s, for polynomial symbols only."""
    if not s.is_polynomial:
        raise CompositionUnavailableError("exact composition unavailable; use pointwise")
    return _substitute(s, f)


def differential_at_zero(f: PolyFn, space: SpaceKind = L2) -> Vector:
    """The vector of degree-one coefficients: coordinate i holds the coefficient of x_i."""
    linear = {index.min_index: c for index, c in f.terms.items() if index.degree == 1}
    coords = np.zeros(max(linear, default=1), dtype=np.complex128)
    for i, c in linear.items():
        coords[i - 1] = c
    return Vector(coords, space)


def linear_functional(u: Vector) -> PolyFn:
    """The degree-one polynomial sum u_i x_i."""
    return PolyFn({MultiIndex(((i, 1),)): c for i, c in enumerate(u.coords, start=1)})


def hull_membership(x: Vector, A: PointSet, dictionary: Dictionary, tol: float = HULL_TOL) -> bool:
    """True iff |f(x)| <= sup_A |f| + tol for every f in the dictionary."""
    if len(A) == 0:
        raise SpaceError("hull_membership needs a nonempty point set")
    if A.space != x.space:
        raise SpaceError(f"Point lives in {x.space}, the set in {A.space}")
    for _, f in dictionary:
        bound = float(np.max(np.abs(evaluate_points(f, A))))
        if abs(evaluate(f, x)) > bound + tol:
            return False
    return True


def functions_from_terms(pairs: Iterable[Tuple[Mapping[int, int], Scalar]]) -> PolyFn:
    """Build a polynomial from (exponent map, coefficient) pairs, summing repeats."""
    result = PolyFn.zero()
    for exponents, coeff in pairs:
        result = result + PolyFn.monomial(exponents, coeff)
    return result
