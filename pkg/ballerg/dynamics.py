"""
Powers and Cesàro means of composition operators C_phi(f) = f o phi.

Operator distances are taken over a finite dictionary of test functions and a
finite point set, so they are lower bounds of the true operator distances and
are reported as "dictionary operator distance". Cesàro means follow
T_[n] = (1/n) sum_{k=0}^{n-1} T^k.
"""
import csv
import io
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np

from .base_symbol import BaseSymbol
from .config import CONVERGED_FLOOR, DEFAULT_TOL, NORMALIZATION_TOL, PERSISTENCE_FACTOR
from .exceptions import DictionaryError, RateFitError
from .functions import (
    Dictionary,
    PolyFn,
    SeminormSpec,
    compose_exact,
    evaluate,
    evaluate_matrix,
    evaluate_points,
)
from .moebius import AutomorphismParam, alpha_rows
from .spaces import L1, PointSet, Vector, backward_shift_vector, basis, norm
from .utils import CompensatedSum


class Mode(str, Enum):
    POWER = "power"
    CESARO = "cesaro"


class LimitCandidate(ABC):
    """A candidate limit operator L, known through its values L(f)(x) on sample points."""

    @abstractmethod
    def values(self, f: PolyFn, points: PointSet) -> np.ndarray:
        """Return L(f) evaluated at every point."""
        pass

    @property
    @abstractmethod
    def label(self) -> str:
        """Return a short description used in reports."""
        pass


@dataclass(frozen=True)
class EvalAtPoint(LimitCandidate):
    """C_a: f -> the constant function f(a)."""

    a: Vector

    def values(self, f: PolyFn, points: PointSet) -> np.ndarray:
        return np.full(len(points), evaluate(f, self.a), dtype=np.complex128)

    @property
    def label(self) -> str:
        return f"C_a(a={self.a!r})" if norm(self.a) > 0 else "C_0"


@dataclass(frozen=True)
class HalfSumWithIdentity(LimitCandidate):
    """(C_{alpha_a} + id) / 2."""

    a: Vector
    param: AutomorphismParam = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "param", AutomorphismParam.of(self.a))

    def values(self, f: PolyFn, points: PointSet) -> np.ndarray:
        matrix = points.as_matrix(f.max_index)
        return 0.5 * (evaluate_matrix(f, alpha_rows(self.param, matrix)) + evaluate_matrix(f, matrix))

    @property
    def label(self) -> str:
        return "(C_alpha + id)/2"


@dataclass(frozen=True)
class Custom(LimitCandidate):
    """Any rule producing sampled values of L(f)."""

    rule: Callable[[PolyFn, PointSet], np.ndarray]
    name: str = "custom"

    @classmethod
    def zero(cls) -> "Custom":
        return cls(lambda f, points: np.zeros(len(points), dtype=np.complex128), "zero")

    def values(self, f: PolyFn, points: PointSet) -> np.ndarray:
        return np.asarray(self.rule(f, points), dtype=np.complex128)

    @property
    def label(self) -> str:
        return self.name


class _PowerStream:
    """Yields the sampled values of f o phi^k for k = 0, 1, 2, ...

    Polynomial symbols are composed exactly and then evaluated; everything else
    is followed point by point.
    """

    def __init__(self, f: PolyFn, s: BaseSymbol, points: PointSet):
        self._exact = s.is_polynomial
        self._s = s
        self._points = points
        self._g = f
        self._f = f
        self._matrix = None if self._exact else points.as_matrix(f.max_index)

    def current(self) -> np.ndarray:
        if self._exact:
            return evaluate_points(self._g, self._points)
        return evaluate_matrix(self._f, self._matrix)

    def advance(self) -> None:
        if self._exact:
            self._g = compose_exact(self._g, self._s)
        else:
            self._matrix = self._s.apply_rows(self._matrix, self._points.space)


def power_apply(f: PolyFn, s: BaseSymbol, n: int, spec: SeminormSpec) -> np.ndarray:
    """Values of f o phi^n on the realized points of ``spec``."""
    if n < 0:
        raise ValueError(f"power_apply needs n >= 0, got {n}")
    stream = _PowerStream(f, s, spec.realize())
    for _ in range(n):
        stream.advance()
    return stream.current()


def cesaro_apply(f: PolyFn, s: BaseSymbol, n: int, spec: SeminormSpec, inclusive: bool = False) -> np.ndarray:
    """Values of (C_phi)_[n] f = (1/n) sum_{k=0}^{n-1} f o phi^k.

    With ``inclusive`` the sum runs to k = n (still divided by n), the variant
    behind the displayed closed forms for alpha_a.
    """
    if n < 1:
        raise ValueError(f"cesaro_apply needs n >= 1, got {n}")
    points = spec.realize()
    stream = _PowerStream(f, s, points)
    acc = CompensatedSum(len(points))
    for k in range(n + 1 if inclusive else n):
        if k:
            stream.advance()
        acc.add(stream.current())
    return acc.total / n


def _sup_gap(values: np.ndarray, limit: np.ndarray) -> float:
    return float(np.max(np.abs(values - limit))) if values.size else 0.0


def _check_dictionary(dictionary: Dictionary) -> None:
    if len(dictionary) == 0:
        raise DictionaryError("operator_distance needs a nonempty dictionary")
    if not dictionary.is_normalized(NORMALIZATION_TOL):
        raise DictionaryError("Dictionary entries must be sup-normalized against the seminorm spec first")


def operator_distance(
    s: BaseSymbol,
    n: int,
    mode: Mode,
    dictionary: Dictionary,
    spec: SeminormSpec,
    limit: LimitCandidate,
) -> float:
    """Dictionary operator distance between C_phi^n (or its n-th Cesàro mean) and ``limit``."""
    _check_dictionary(dictionary)
    points = spec.realize()
    apply_fn = power_apply if Mode(mode) is Mode.POWER else cesaro_apply
    return max(_sup_gap(apply_fn(f, s, n, spec), limit.values(f, points)) for _, f in dictionary)


def seminorm_growth(s: BaseSymbol, dictionary: Dictionary, spec: SeminormSpec, n_max: int) -> List[float]:
    """sup over the dictionary of sup_K |f o phi^n| for n = 1..n_max.

    These are the per-n seminorm sizes from which admissible topologizability
    weights a_n can be read off.
    """
    trace = build_trace(s, dictionary, spec, Custom.zero(), n_max)
    return [row.dist_power for row in trace.values]


def backward_shift_cesaro_l1_norm(N: int) -> float:
    """(1/N) |sum_{j=0}^{N-1} B^j e_N|_{l1}, computed by shifting e_N."""
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    total = np.zeros(N, dtype=np.complex128)
    v = basis(N, N, L1)
    for _ in range(N):
        total[: v.dim] += v.coords
        v = backward_shift_vector(v)
    return norm(Vector(total, L1)) / N


@dataclass(frozen=True)
class TraceRow:
    n: int
    dist_power: float
    dist_cesaro: float


@dataclass(frozen=True)
class CesaroTrace:
    """Per-n seminorm distances of powers and Cesàro means to a limit candidate."""

    symbol: BaseSymbol
    f_label: str
    spec: SeminormSpec
    limit: LimitCandidate
    values: Tuple[TraceRow, ...]

    def __post_init__(self):
        ns = [row.n for row in self.values]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("Trace rows must have strictly increasing n")

    def __len__(self) -> int:
        return len(self.values)

    def column(self, name: str) -> Tuple[np.ndarray, np.ndarray]:
        """(n, distance) arrays for the ``power`` or ``cesaro`` column."""
        attr = {"power": "dist_power", "cesaro": "dist_cesaro"}[Mode(name).value]
        ns = np.array([row.n for row in self.values], dtype=float)
        return ns, np.array([getattr(row, attr) for row in self.values], dtype=float)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["n", "dist_power", "dist_cesaro"])
        for row in self.values:
            writer.writerow([row.n, repr(row.dist_power), repr(row.dist_cesaro)])
        return buffer.getvalue()

    def to_dict(self) -> dict:
        from .codec import symbol_to_json

        return {
            "symbol": symbol_to_json(self.symbol),
            "f_label": self.f_label,
            "spec": self.spec.to_dict(),
            "limit": self.limit.label,
            "values": [[row.n, row.dist_power, row.dist_cesaro] for row in self.values],
        }


def build_trace(
    s: BaseSymbol,
    dictionary: Dictionary,
    spec: SeminormSpec,
    limit: LimitCandidate,
    n_max: int,
) -> CesaroTrace:
    """Distances for n = 1..n_max, maintained incrementally with compensated Cesàro sums."""
    if len(dictionary) == 0:
        raise DictionaryError("build_trace needs a nonempty dictionary")
    points = spec.realize()
    power = np.zeros(n_max)
    cesaro = np.zeros(n_max)
    for _, f in dictionary:
        target = limit.values(f, points)
        stream = _PowerStream(f, s, points)
        acc = CompensatedSum(len(points))
        for n in range(1, n_max + 1):
            acc.add(stream.current())
            stream.advance()
            power[n - 1] = max(power[n - 1], _sup_gap(stream.current(), target))
            cesaro[n - 1] = max(cesaro[n - 1], _sup_gap(acc.total / n, target))
    rows = tuple(TraceRow(n, float(power[n - 1]), float(cesaro[n - 1])) for n in range(1, n_max + 1))
    return CesaroTrace(s, ",".join(dictionary.labels), spec, limit, rows)


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit log(dist) ~ log(constant) + n log(rate)."""

    rate: float
    constant: float
    residual: float
    window: Tuple[int, int]
    converged: bool = False

    def to_dict(self) -> dict:
        return {
            "rate": self.rate,
            "constant": self.constant,
            "residual": self.residual,
            "window": list(self.window),
            "converged": self.converged,
        }


def _windowed(trace: CesaroTrace, column: str, window: Optional[Tuple[int, int]]):
    ns, ds = trace.column(column)
    if window is None:
        window = (int(ns[0]), int(ns[-1])) if ns.size else (0, 0)
    keep = (ns >= window[0]) & (ns <= window[1])
    return ns[keep], ds[keep], window


def rate_fit(trace: CesaroTrace, column: str = "power", window: Optional[Tuple[int, int]] = None) -> RateFit:
    """Geometric rate of the distances in ``column`` over ``window``."""
    ns, ds, window = _windowed(trace, column, window)
    positive = ds > CONVERGED_FLOOR
    if not np.any(positive):
        return RateFit(rate=0.0, constant=0.0, residual=0.0, window=window, converged=True)
    if np.count_nonzero(positive) < 3:
        raise RateFitError(f"rate_fit needs at least 3 distances above {CONVERGED_FLOOR:g} in window {window}")
    x, y = ns[positive], np.log(ds[positive])
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return RateFit(rate=float(np.exp(slope)), constant=float(np.exp(intercept)), residual=residual, window=window)


@dataclass(frozen=True)
class InverseNFit:
    """Fit dist ~ constant / n; ``envelope`` is max n * dist over the window."""

    constant: float
    envelope: float
    window: Tuple[int, int]

    def to_dict(self) -> dict:
        return {"constant": self.constant, "envelope": self.envelope, "window": list(self.window)}


def inverse_n_fit(trace: CesaroTrace, column: str = "cesaro", window: Optional[Tuple[int, int]] = None) -> InverseNFit:
    ns, ds, window = _windowed(trace, column, window)
    if ns.size == 0:
        raise RateFitError(f"No trace rows in window {window}")
    inv = 1.0 / ns
    constant = float(np.dot(ds, inv) / np.dot(inv, inv))
    return InverseNFit(constant=constant, envelope=float(np.max(ns * ds)), window=window)


class VerdictKind(str, Enum):
    CONVERGES = "converges"
    PERSISTS = "persists"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    basis: str
    window: Tuple[int, int]
    window_max: float
    window_min: float
    first_n_below_tol: Optional[int]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "basis": self.basis,
            "window": list(self.window),
            "window_max": self.window_max,
            "window_min": self.window_min,
            "first_n_below_tol": self.first_n_below_tol,
        }


def ergodicity_verdict(trace: CesaroTrace, tol: float = DEFAULT_TOL, column: str = "cesaro") -> Verdict:
    """Desk-scale verdict on the last third of the trace.

    converges: the window stays below tol, or n * dist over the window never
    exceeds its maximum before the window (1/n decay). persists: the window
    stays above PERSISTENCE_FACTOR * tol. Anything else is inconclusive.
    """
    if len(trace) < 10:
        raise ValueError(f"ergodicity_verdict needs at least 10 trace rows, got {len(trace)}")
    ns, ds = trace.column(column)
    start = len(ns) - math.ceil(len(ns) / 3)
    window = (int(ns[start]), int(ns[-1]))
    inside, before = ds[start:], ds[:start]
    weighted = ns * ds

    first_below = None
    for i in range(len(ds)):
        if np.all(ds[i:] < tol):
            first_below = int(ns[i])
            break

    if inside.max() < tol:
        kind, basis = VerdictKind.CONVERGES, "below-tol"
    elif weighted[start:].max() <= weighted[:start].max() * (1.0 + 1e-9) + CONVERGED_FLOOR:
        kind, basis = VerdictKind.CONVERGES, "inverse-n-decay"
    elif inside.min() > PERSISTENCE_FACTOR * tol:
        kind, basis = VerdictKind.PERSISTS, "bounded-away"
    else:
        kind, basis = VerdictKind.INCONCLUSIVE, "mixed"
    return Verdict(kind, basis, window, float(inside.max()), float(inside.min()), first_below)


def ball_power_bound(r: float, n: int) -> float:
    """2 r^n: bound on |C_phi^n - C_0| when phi(0) = 0 and phi(B) lies in rB."""
    return 2.0 * r**n


def radius_power_bound(f_norm: float, rho: float, t: float, n: int) -> float:
    """2 |f|_{tB} (rho/t)^(n-1): bound on |f o phi^n - f(0)| over tB when phi^n(tB) lies in rho B."""
    return 2.0 * f_norm * (rho / t) ** (n - 1)


def alpha_cesaro_closed_form(f: PolyFn, a: Vector, n: int, spec: SeminormSpec, inclusive: bool = False) -> np.ndarray:
    """Closed form of the n-th Cesàro mean of C_{alpha_a} applied to f.

    alpha_a is an involution, so the powers alternate between id and C_alpha.
    Default indexing: T_[2k] = (C + id)/2 and T_[2k-1] = (k id + (k-1) C)/(2k-1).
    Inclusive indexing: T_[2k-1] = k/(2k-1) (C + id) and T_[2k] = (C + id)/2 + id/(2k).
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    matrix = spec.realize().as_matrix(f.max_index)
    ident = evaluate_matrix(f, matrix)
    moved = evaluate_matrix(f, alpha_rows(AutomorphismParam.of(a), matrix))
    k = (n + 1) // 2
    if not inclusive:
        if n % 2 == 0:
            return 0.5 * (moved + ident)
        return (k * ident + (k - 1) * moved) / n
    if n % 2 == 1:
        return k / n * (moved + ident)
    return 0.5 * (moved + ident) + ident / n
