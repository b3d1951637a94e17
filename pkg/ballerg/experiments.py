"""
Built-in experiment catalog.

Each experiment takes an ExperimentConfig, runs a desk-scale reproduction of a
statement about composition operators on the ball and returns an
ExperimentResult holding its bound checks, fits, verdicts and plot series.
Nothing here prints or writes files; that is the runner's and writer's job.
"""
import zlib
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .base_symbol import BaseSymbol
from .codec import load_dictionary, space_from_json, symbol_from_json
from .config import ExperimentConfig
from .dynamics import (
    CesaroTrace,
    EvalAtPoint,
    HalfSumWithIdentity,
    Mode,
    alpha_cesaro_closed_form,
    backward_shift_cesaro_l1_norm,
    ball_power_bound,
    build_trace,
    cesaro_apply,
    ergodicity_verdict,
    inverse_n_fit,
    operator_distance,
    power_apply,
    radius_power_bound,
    rate_fit,
)
from .exceptions import ConfigError, DictionaryError, SymbolError
from .functions import (
    Dictionary,
    ExplicitPoints,
    MultiIndex,
    PolyFn,
    SphereSample,
    compose_exact,
    coordinate_dictionary,
    differential_at_zero,
    evaluate,
    evaluate_matrix,
    hull_membership,
    linear_functional,
    monomial_dictionary,
)
from .moebius import AutomorphismParam, alpha, alpha_rows, disc_identity_residual, rho_bound
from .spaces import L1, L2, PointSet, SpaceKind, Vector, backward_shift_vector, basis, distance, norm, row_norms, zeros
from .symbols import (
    AffineContracted,
    AffineHalf,
    BackwardShift,
    Composite,
    Constant,
    CoordinatePower,
    CoordinateSquare,
    DiagonalLinear,
    ForwardShift,
    MoebiusAuto,
    conjugate,
    fixed_point,
    fixes_origin,
    image_radius,
    iterate,
    recenter,
    schwarz_profile,
    stability_probe,
)


@dataclass(frozen=True)
class Check:
    """One declared bound check; ``passed`` decides the exit status."""

    name: str
    passed: bool
    value: Optional[float] = None
    bound: Optional[float] = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "bound": self.bound,
            "detail": self.detail,
        }


def check_at_most(name: str, value: float, bound: float, detail: str = "") -> Check:
    return Check(name, bool(value <= bound), float(value), float(bound), detail)


def check_at_least(name: str, value: float, bound: float, detail: str = "") -> Check:
    return Check(name, bool(value >= bound), float(value), float(bound), detail)


def check_true(name: str, ok: bool, detail: str = "") -> Check:
    return Check(name, bool(ok), detail=detail)


@dataclass
class ExperimentResult:
    experiment: str
    seed: int
    checks: List[Check] = field(default_factory=list)
    trace: Optional[CesaroTrace] = None
    fits: Dict[str, dict] = field(default_factory=dict)
    verdicts: Dict[str, dict] = field(default_factory=dict)
    evidence: Dict[str, Any] = field(default_factory=dict)
    series: Dict[str, List[Tuple[float, float]]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def failed_checks(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]


@dataclass(frozen=True)
class Experiment:
    """A catalog entry: id, the statement it checks, its default config layer and its body.

    ``accepts_symbol`` and ``accepts_dictionary`` say whether the body reads the
    config's symbol and dictionary; ``param_names`` lists the params it reads.
    """

    id: str
    title: str
    statement: str
    body: Callable[[ExperimentConfig], ExperimentResult]
    defaults: Dict[str, Any] = field(default_factory=dict)
    accepts_symbol: bool = False
    accepts_dictionary: bool = False
    param_names: FrozenSet[str] = frozenset()

    def check(self, config: ExperimentConfig) -> ExperimentConfig:
        """Reject config parts this experiment would ignore or cannot use; returns the config."""
        if config.symbol is not None:
            if not self.accepts_symbol:
                raise ConfigError(f"{self.id} runs fixed symbols and does not take a 'symbol'")
            try:
                symbol_from_json(config.symbol, config.dim_cap)
            except (SymbolError, ValueError, TypeError) as e:
                raise ConfigError(f"Invalid symbol for {self.id}: {e}") from e
        if config.dictionary is not None:
            if not self.accepts_dictionary:
                raise ConfigError(f"{self.id} builds its own dictionary and does not take a 'dictionary'")
            try:
                load_dictionary(config.dictionary)
            except (DictionaryError, ValueError, TypeError) as e:
                raise ConfigError(f"Invalid dictionary for {self.id}: {e}") from e
        unknown = set(config.params) - self.param_names
        if unknown:
            raise ConfigError(f"Unknown params for {self.id}: {', '.join(sorted(unknown))}")
        for name, value in config.params.items():
            _check_param(name, value)
        return config

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        return self.body(config)


CATALOG: Dict[str, Experiment] = {}


def _unit(v: float) -> bool:
    return 0.0 < v < 1.0


def _count(v: float) -> bool:
    return isinstance(v, int) and v >= 1


def _positive(v: float) -> bool:
    return v > 0.0


# name -> (rule, description, list-valued)
_PARAM_RULES: Dict[str, Tuple[Callable[[float], bool], str, bool]] = {
    "radii": (_unit, "a number in (0, 1)", True),
    "rates": (_unit, "a number in (0, 1)", True),
    "t_ball": (_unit, "a number in (0, 1)", False),
    "a_norm": (_unit, "a number in (0, 1)", False),
    "max_norm": (_unit, "a number in (0, 1)", False),
    "radius": (_unit, "a number in (0, 1)", False),
    "dims": (_count, "a positive integer", True),
    "N": (_count, "a positive integer", True),
    "pairs": (_count, "a positive integer", False),
    "radius_pairs": (_count, "a positive integer", False),
    "indices": (_count, "a positive integer", False),
    "max_support": (_count, "a positive integer", False),
    "oracle_triples": (_count, "a positive integer", False),
    "closed_form_n": (_count, "a positive integer", False),
    "persist_n": (_count, "a positive integer", False),
    "max_degree": (_count, "a positive integer", False),
    "circle_points": (_count, "a positive integer", False),
    "max_rate": (_positive, "a positive number", False),
    "max_constant": (_positive, "a positive number", False),
}


def _check_param(name: str, value: Any) -> None:
    rule, wanted, listed = _PARAM_RULES[name]
    if listed:
        if not isinstance(value, list) or not value:
            raise ConfigError(f"Param {name!r} must be a nonempty list, got {value!r}")
        values = value
    else:
        values = [value]
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not rule(v):
            raise ConfigError(f"Param {name!r} must be {wanted}, got {v!r}")


def register(
    experiment_id: str,
    title: str,
    statement: str,
    defaults: Optional[Dict[str, Any]] = None,
    symbol: bool = False,
    dictionary: bool = False,
    extra_params: Sequence[str] = (),
):
    defaults = defaults or {}
    param_names = frozenset(defaults.get("params", {})) | frozenset(extra_params)

    def wrap(body: Callable[[ExperimentConfig], ExperimentResult]):
        CATALOG[experiment_id] = Experiment(
            experiment_id, title, statement, body, defaults, symbol, dictionary, param_names
        )
        return body

    return wrap


def get_experiment(experiment_id: str) -> Experiment:
    try:
        return CATALOG[experiment_id]
    except KeyError:
        raise ConfigError(
            f"Unknown experiment {experiment_id!r}; choose from {', '.join(CATALOG)}"
        ) from None


def _rng(config: ExperimentConfig, salt: str) -> np.random.Generator:
    return np.random.default_rng([config.seed, zlib.crc32(salt.encode("utf-8"))])


def _ball_rows(rng: np.random.Generator, count: int, dim: int, max_radius: float) -> np.ndarray:
    """Random complex rows with l_2 norm uniform in [0, max_radius]."""
    raw = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    raw /= np.linalg.norm(raw, axis=1)[:, None]
    return raw * (max_radius * rng.uniform(0.0, 1.0, count))[:, None]


def _space(config: ExperimentConfig) -> SpaceKind:
    return space_from_json(config.spec.space)


def _sphere(config: ExperimentConfig, t: Optional[float] = None, space: Optional[SpaceKind] = None) -> SphereSample:
    return SphereSample(
        t=config.spec.t if t is None else t,
        count=config.spec.count,
        seed=config.seed,
        dim=config.spec.dim,
        space=space or _space(config),
    )


def _symbol(config: ExperimentConfig, default: BaseSymbol) -> BaseSymbol:
    return symbol_from_json(config.symbol, config.dim_cap) if config.symbol else default


def _dictionary(config: ExperimentConfig, default: Dictionary) -> Dictionary:
    return load_dictionary(config.dictionary) if config.dictionary else default


def _series(trace: CesaroTrace, column: str) -> List[Tuple[float, float]]:
    ns, ds = trace.column(column)
    return list(zip(ns.tolist(), ds.tolist()))


@register(
    "moebius-identities",
    "Möbius automorphism identities",
    "alpha_a(0) = a, alpha_a(a) = 0, alpha_a o alpha_a = id, the disc identity, and alpha_a(rB) inside "
    "sqrt(1 - (1 - r)^2) B for |a| <= r",
    {"params": {"dims": [1, 2, 8, 32], "pairs": 10_000, "max_norm": 0.9, "radius_pairs": 1000}},
)
def moebius_identities(config: ExperimentConfig) -> ExperimentResult:
    result = ExperimentResult("moebius-identities", config.seed)
    rng = _rng(config, result.experiment)
    dims = config.param("dims", [1, 2, 8, 32])
    per_dim = max(config.param("pairs", 10_000) // len(dims), 1)
    max_norm = config.param("max_norm", 0.9)
    centres = int(np.ceil(np.sqrt(per_dim)))
    per_centre = int(np.ceil(per_dim / centres))

    worst = {"alpha_a(0)=a": 0.0, "alpha_a(a)=0": 0.0, "involution": 0.0, "disc identity": 0.0}
    for dim in dims:
        for row in _ball_rows(rng, centres, dim, max_norm):
            a = Vector(row)
            p = AutomorphismParam.of(a)
            xs = _ball_rows(rng, per_centre, dim, max_norm)
            ys = alpha_rows(p, xs)
            x_norms, y_norms = row_norms(xs, L2), row_norms(ys, L2)
            pairing = 1.0 - xs @ np.conj(a.coords)
            residual = np.abs((1.0 - y_norms**2) - (1.0 - norm(a) ** 2) * (1.0 - x_norms**2) / np.abs(pairing) ** 2)
            worst["alpha_a(0)=a"] = max(worst["alpha_a(0)=a"], distance(alpha(p, zeros(dim)), a))
            worst["alpha_a(a)=0"] = max(worst["alpha_a(a)=0"], norm(alpha(p, a)))
            worst["involution"] = max(worst["involution"], float(row_norms(alpha_rows(p, ys) - xs, L2).max()))
            worst["disc identity"] = max(
                worst["disc identity"], float(residual.max()), disc_identity_residual(p, Vector(xs[0]))
            )
    for name, value in worst.items():
        result.checks.append(check_at_most(name, value, 1e-10, f"max over {per_dim * len(dims)} pairs"))

    radius_pairs = config.param("radius_pairs", 1000)
    for r in (k / 10 for k in range(1, 10)):
        largest = 0.0
        for row in _ball_rows(rng, 20, 8, r):
            images = alpha_rows(Vector(row), _ball_rows(rng, radius_pairs // 20, 8, r))
            largest = max(largest, float(row_norms(images, L2).max()))
        result.checks.append(check_at_most(f"radius bound r={r:g}", largest, rho_bound(r) + 1e-12))
        result.series.setdefault("radius_bound", []).append((float(r), largest))
    result.evidence["worst"] = worst
    return result


@register(
    "schwarz-sweep",
    "Schwarz lemma across the symbol zoo",
    "every self-map fixing 0 satisfies |phi(x)| <= |x|",
    {"params": {"radii": [0.3, 0.6, 0.9]}},
)
def schwarz_sweep(config: ExperimentConfig) -> ExperimentResult:
    result = ExperimentResult("schwarz-sweep", config.seed)
    zoo = [
        ForwardShift(config.dim_cap),
        BackwardShift(),
        CoordinateSquare(),
        CoordinatePower(3),
        DiagonalLinear((0.9, -0.5, 0.3), 0.7),
        AffineContracted(0.8, 0.0),
        Composite((BackwardShift(), CoordinateSquare())),
    ]
    for t in config.param("radii", [0.3, 0.6, 0.9]):
        samples = _sphere(config, t=t, space=L2).realize()
        for s in zoo:
            profile = schwarz_profile(s, samples)
            result.checks.append(check_at_most(f"{s.type_name} at t={t:g}", profile, 1.0 + 1e-10))
            result.series.setdefault(s.type_name, []).append((float(t), profile))

    # alpha_a moves 0, so the hypothesis check must refuse it.
    try:
        schwarz_profile(MoebiusAuto(0.5 * basis(1)), PointSet.of([0.1 * basis(1)]))
        rejected = False
    except SymbolError:
        rejected = True
    result.checks.append(check_true("moebius rejected", rejected, "alpha_a does not fix 0"))
    return result


@register(
    "orbit-affine-escape",
    "Escaping orbit of x -> ((x1 + 1)/2, 0, ...)",
    "the orbit of 0 has norms 1 - 2^-n and leaves every ball-bounded set",
    {"n_max": 40, "spec": {"space": "c0"}},
)
def orbit_affine_escape(config: ExperimentConfig) -> ExperimentResult:
    result = ExperimentResult("orbit-affine-escape", config.seed)
    s = AffineHalf()
    space = _space(config)
    # 1 - 2^-n is exactly representable up to n = 52; the stability check below runs the full n_max.
    n_max = min(config.n_max, 52)
    orbit = iterate(s, zeros(1, space), n_max)
    exact = all(size == 1.0 - 2.0**-n for n, size in enumerate(orbit.norms))
    result.checks.append(check_true("norms equal 1 - 2^-n", exact, f"n <= {n_max}, {space}"))

    seeds = PointSet.of([zeros(1, space), 0.25 * basis(1, space=space), -0.5 * basis(1, space=space)])
    report = stability_probe(s, seeds, config.n_max, config.delta)
    result.checks.append(check_true("escape detected", report.escape))
    result.checks.append(check_true("not ball-stable", not report.ball_stable_evidence))
    result.evidence["stability"] = report.to_dict()
    result.series["orbit_norms"] = [(float(n), size) for n, size in enumerate(orbit.norms)]
    return result


@register(
    "shift-separation",
    "Forward-shift orbit of e1/2 in c0",
    "the orbit stays on the sphere of radius 1/2 with pairwise distance 1/2, "
    "so it is bounded but not relatively compact",
    {"n_max": 100, "spec": {"space": "c0"}},
)
def shift_separation(config: ExperimentConfig) -> ExperimentResult:
    result = ExperimentResult("shift-separation", config.seed)
    space = _space(config)
    start = 0.5 * basis(1, space=space)
    report = stability_probe(ForwardShift(config.dim_cap), PointSet.of([start]), config.n_max, config.delta)
    result.checks.append(check_true("sup norm is 1/2", report.sup_norm == 0.5, f"{report.sup_norm!r}"))
    result.checks.append(check_true("separation is 1/2", report.separation == 0.5, f"{report.separation!r}"))
    result.checks.append(check_true("bounded orbit", report.ball_stable_evidence))
    result.evidence["stability"] = report.to_dict()
    return result


@register(
    "beethoven-l1",
    "Backward shift on l1: Cesàro means of e_N",
    "|(1/N) sum_{j<N} B^j e_N|_1 = 1 for every N, and P o C_F o J = B on l1",
    {"params": {"N": list(range(1, 101)) + [1000, 10_000]}},
)
def beethoven_l1(config: ExperimentConfig) -> ExperimentResult:
    result = ExperimentResult("beethoven-l1", config.seed)
    values = [(N, backward_shift_cesaro_l1_norm(N)) for N in config.param("N", list(range(1, 101)) + [1000, 10_000])]
    worst = max(abs(v - 1.0) for _, v in values)
    result.checks.append(check_at_most("|norm - 1|", worst, 1e-12, f"{len(values)} values of N"))
    result.evidence["exactly_one"] = sum(1 for _, v in values if v == 1.0)
    result.series["cesaro_l1_norm"] = [(float(N), v) for N, v in values]

    rng = _rng(config, result.experiment)
    raw = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    u = Vector(raw / np.abs(raw).sum() * 0.9, L1)
    recovered = differential_at_zero(compose_exact(linear_functional(u), ForwardShift(config.dim_cap)), L1)
    result.checks.append(check_true("P o C_F o J = B", recovered == backward_shift_vector(u)))
    return result


def _random_polyfn(rng: np.random.Generator, max_index: int = 6, max_power: int = 3) -> PolyFn:
    terms = {}
    for _ in range(rng.integers(1, 5)):
        exponents = {int(i): int(rng.integers(0, max_power + 1)) for i in rng.choice(np.arange(1, max_index + 1), 2)}
        terms[MultiIndex.of(exponents)] = complex(rng.standard_normal(), rng.standard_normal())
    return PolyFn(terms)


@register(
    "monomial-kill",
    "Forward shift kills monomials",
    "(F^n x)^alpha = 0 once n reaches the support of alpha; exact and pointwise composition agree",
    {"params": {"indices": 100, "max_support": 10, "oracle_triples": 1000}},
)
def monomial_kill(config: ExperimentConfig) -> ExperimentResult:
    result = ExperimentResult("monomial-kill", config.seed)
    rng = _rng(config, result.experiment)
    shift = ForwardShift(config.dim_cap)

    killed, survived, sharp = True, True, 0
    for _ in range(config.param("indices", 100)):
        n_h = int(rng.integers(1, config.param("max_support", 10) + 1))
        support = set(rng.choice(np.arange(1, n_h + 1), int(rng.integers(1, n_h + 1)), replace=False).tolist()) | {n_h}
        f = PolyFn.monomial({i: int(rng.integers(1, 4)) for i in support}, complex(rng.standard_normal(), 1.0))
        g = f
        for n in range(1, n_h + 4):
            g = compose_exact(g, shift)
            if n >= n_h:
                killed &= g.is_zero
            elif n == n_h - 1 and min(support) == n_h:
                survived &= not g.is_zero
                sharp += 1
    result.checks.append(check_true("zero for n >= n_h", killed))
    result.checks.append(check_true("nonzero at n_h - 1", survived, f"{sharp} indices with min support n_h"))

    pool = [
        ForwardShift(config.dim_cap),
        BackwardShift(),
        CoordinateSquare(),
        CoordinatePower(3),
        DiagonalLinear((0.9, -0.5, 0.3), 0.7),
        AffineContracted(0.6, 0.3),
        Constant(Vector([0.2, -0.1j, 0.3])),
        Composite((BackwardShift(), CoordinateSquare())),
        Composite((DiagonalLinear.uniform(0.8), ForwardShift(config.dim_cap))),
    ]
    triples = config.param("oracle_triples", 1000)
    points = _ball_rows(rng, triples, 8, 0.9)
    worst = 0.0
    for k in range(triples):
        s = pool[k % len(pool)]
        f = _random_polyfn(rng)
        x = Vector(points[k])
        worst = max(worst, abs(evaluate(compose_exact(f, s), x) - evaluate(f, s.apply(x))))
    result.checks.append(check_at_most("exact vs pointwise", worst, 1e-10, f"{triples} triples"))
    return result


@register(
    "servicio-rate",
    "Uniform rate for maps into rB fixing 0",
    "phi(0) = 0 and phi(B) inside rB give |C_phi^n - C_0| <= 2 r^n",
    {"params": {"rates": [0.3, 0.5, 0.8], "t_ball": 0.999, "max_degree": 2}},
    dictionary=True,
)
def servicio_rate(config: ExperimentConfig) -> ExperimentResult:
    result = ExperimentResult("servicio-rate", config.seed)
    spec = _sphere(config, t=config.param("t_ball", 0.999), space=L2)
    dictionary = _dictionary(config, monomial_dictionary(config.spec.dim, config.param("max_degree", 2))).normalized(
        spec
    )
    limit = EvalAtPoint(zeros(1))
    for r in config.param("rates", [0.3, 0.5, 0.8]):
        s = DiagonalLinear.uniform(r)
        trace = build_trace(s, dictionary, spec, limit, config.n_max)
        excess = max(row.dist_power - ball_power_bound(r, row.n) for row in trace.values)
        result.checks.append(check_at_most(f"dist <= 2r^n, r={r:g}", excess, 1e-9, "max of dist - 2r^n"))
        fit = rate_fit(trace, "power")
        result.checks.append(check_at_most(f"rate r={r:g}", abs(fit.rate - r), 0.02, f"fitted {fit.rate:.6f}"))
        first = operator_distance(s, 1, Mode.POWER, dictionary, spec, limit)
        result.checks.append(check_at_most(f"trace agrees, r={r:g}", abs(first - trace.values[0].dist_power), 1e-12))
        result.fits[f"power r={r:g}"] = fit.to_dict()
        result.series[f"power_r{r:g}"] = _series(trace, "power")
        if result.trace is None:
            result.trace = trace
    return result


@register(
    "janacek-rate",
    "(rho/t)^n rate on tB",
    "phi(0) = 0 and phi(tB) inside rho B give |f o phi^n - f(0)|_tB <= 2 |f|_tB (rho/t)^(n-1)",
    {"spec": {"t": 0.5}},
    symbol=True,
    extra_params=("max_rate",),
)
def janacek_rate(config: ExperimentConfig) -> ExperimentResult:
    result = ExperimentResult("janacek-rate", config.seed)
    s = _symbol(config, CoordinateSquare())
    spec = _sphere(config, space=L2)
    t = spec.t
    rho = image_radius(s, spec.realize())
    result.checks.append(check_at_most("image radius <= t^2", rho, t * t + 1e-12))
    result.evidence["image_radius"] = rho

    limit = EvalAtPoint(zeros(1))
    raw = build_trace(s, coordinate_dictionary(config.spec.dim), spec, limit, config.n_max)
    # |x_i| <= |x| on the true ball, so |x_i|_tB = t and the hypothesis radius is t^2.
    excess = max(row.dist_power - radius_power_bound(t, t * t, t, row.n) for row in raw.values)
    result.checks.append(check_at_most("dist <= 2|f|(rho/t)^(n-1)", excess, 1e-15))

    trace = build_trace(s, coordinate_dictionary(config.spec.dim).normalized(spec), spec, limit, config.n_max)
    fit = rate_fit(trace, "power")
    result.checks.append(check_at_most("fitted power rate", fit.rate, config.param("max_rate", 0.55)))
    result.fits["power"] = fit.to_dict()
    result.verdicts["power"] = ergodicity_verdict(trace, config.tol, "power").to_dict()
    result.trace = trace
    result.series["power"] = _series(trace, "power")
    return result


def _z_points(exponents: Sequence[int]) -> ExplicitPoints:
    return ExplicitPoints(
        PointSet.of([(1.0 - 10.0**-e) * basis(1) for e in exponents], f"z_m, m=10^{exponents[0]}..10^{exponents[-1]}")
    )


@register(
    "square-counterexample",
    "Coordinate square is not mean ergodic on H(B)",
    "sup_m (1/n) sum_{k<n} (1 - 1/m)^(2^k) = 1, so the Cesàro means of C_phi do not converge to C_0",
    {"params": {"closed_form_n": 20, "persist_n": 20}},
)
def square_counterexample(config: ExperimentConfig) -> ExperimentResult:
    result = ExperimentResult("square-counterexample", config.seed)
    s = CoordinateSquare()
    x1 = PolyFn.coordinate(1)

    grid = _z_points(range(1, 7))
    bases = [point.coords[0].real for point in grid.realize()]
    worst = 0.0
    for n in range(1, config.param("closed_form_n", 20) + 1):
        values = cesaro_apply(x1, s, n, grid)
        expected = [sum(base ** (2**k) for k in range(n)) / n for base in bases]
        worst = max(worst, float(np.max(np.abs(values - np.array(expected)))))
    result.checks.append(check_at_most("closed form", worst, 1e-12, "m = 10..10^6"))

    # m up to 10^6 only keeps the sup above 0.99 for n <= 17; the finer grid reaches n = 20.
    extended = _z_points(range(1, 10))
    dictionary = Dictionary((("x1", x1),)).normalized(extended)
    trace = build_trace(s, dictionary, extended, EvalAtPoint(zeros(1)), max(config.n_max, 20))
    persist_n = config.param("persist_n", 20)
    low = min(row.dist_cesaro for row in trace.values if row.n <= persist_n)
    result.checks.append(check_at_least(f"cesaro dist for n <= {persist_n}", low, 0.99, "m = 10..10^9"))
    verdict = ergodicity_verdict(trace, config.tol)
    result.checks.append(check_true("verdict persists", verdict.kind.value == "persists", verdict.basis))
    result.verdicts["cesaro"] = verdict.to_dict()
    result.trace = trace
    result.series["cesaro"] = _series(trace, "cesaro")
    return result


@register(
    "alpha-cesaro-limit",
    "Cesàro means of C_{alpha_a}",
    "(C_alpha)_[n] converges to (C_alpha + id)/2 like 1/n, with explicit even and odd closed forms",
    {"n_max": 200, "params": {"a_norm": 0.8}},
    extra_params=("max_constant",),
)
def alpha_cesaro_limit(config: ExperimentConfig) -> ExperimentResult:
    result = ExperimentResult("alpha-cesaro-limit", config.seed)
    rng = _rng(config, result.experiment)
    a = Vector(_ball_rows(rng, 1, config.spec.dim, config.param("a_norm", 0.8))[0])
    s = MoebiusAuto(a)
    spec = _sphere(config, space=L2)
    dictionary = coordinate_dictionary(config.spec.dim).normalized(spec)

    trace = build_trace(s, dictionary, spec, HalfSumWithIdentity(a), config.n_max)
    fit = inverse_n_fit(trace, "cesaro")
    result.checks.append(check_at_most("n * dist", fit.envelope, config.param("max_constant", 2.0)))
    result.checks.append(check_at_most("fitted C", fit.constant, config.param("max_constant", 2.0)))
    verdict = ergodicity_verdict(trace, config.tol)
    result.checks.append(check_true("verdict converges", verdict.kind.value == "converges", verdict.basis))
    result.fits["cesaro"] = fit.to_dict()
    result.verdicts["cesaro"] = verdict.to_dict()

    test_fns = [PolyFn.coordinate(1), PolyFn.monomial({1: 1, 2: 1}) + PolyFn.monomial({3: 2}, 0.5)]
    ns = sorted(set(range(1, 11)) | {config.n_max - 1, config.n_max})
    worst = 0.0
    for f in test_fns:
        for n in ns:
            for inclusive in (False, True):
                gap = cesaro_apply(f, s, n, spec, inclusive) - alpha_cesaro_closed_form(f, a, n, spec, inclusive)
                worst = max(worst, float(np.max(np.abs(gap))))
    result.checks.append(check_at_most("closed forms", worst, 1e-10, "even and odd n, both indexings"))
    result.evidence["a_norm"] = norm(a)
    result.trace = trace
    result.series["cesaro"] = _series(trace, "cesaro")
    return result


@register(
    "conjugate-fixed-point",
    "Conjugated symbols converge to their fixed point",
    "for psi = alpha_a o phi o alpha_a with phi(0) = 0 and phi(B) inside rB, psi fixes a and C_psi^n -> C_a",
    {"n_max": 100, "params": {"a_norm": 0.6}},
    symbol=True,
)
def conjugate_fixed_point(config: ExperimentConfig) -> ExperimentResult:
    result = ExperimentResult("conjugate-fixed-point", config.seed)
    rng = _rng(config, result.experiment)
    a = Vector(_ball_rows(rng, 1, config.spec.dim, config.param("a_norm", 0.6))[0])
    inner = _symbol(config, DiagonalLinear.uniform(0.5))
    psi = conjugate(a, inner)

    found = fixed_point(psi)
    result.checks.append(check_at_most("fixed point is a", distance(found, a), 1e-8))

    spec = _sphere(config, space=L2)
    dictionary = coordinate_dictionary(config.spec.dim).normalized(spec)
    trace = build_trace(psi, dictionary, spec, EvalAtPoint(a), config.n_max)
    below = [row.n for row in trace.values if row.dist_power < config.tol]
    result.checks.append(check_true("power dist below tol", bool(below), f"first n = {below[0] if below else None}"))
    verdict = ergodicity_verdict(trace, config.tol)
    result.checks.append(check_true("cesaro verdict converges", verdict.kind.value == "converges", verdict.basis))
    result.verdicts["cesaro"] = verdict.to_dict()
    result.verdicts["power"] = ergodicity_verdict(trace, config.tol, "power").to_dict()

    # psi^n = alpha_a o phi^n o alpha_a: follow phi on the transported points and map back.
    f = PolyFn.coordinate(1)
    param = AutomorphismParam.of(a)
    moved = ExplicitPoints.mapped(spec, MoebiusAuto(a)).realize().as_matrix()
    worst = 0.0
    for n in range(1, 11):
        moved = inner.apply_rows(moved, L2)
        gap = power_apply(f, psi, n, spec) - evaluate_matrix(f, alpha_rows(param, moved))
        worst = max(worst, float(np.max(np.abs(gap))))
    result.checks.append(check_at_most("conjugation transfer", worst, 1e-8, "n <= 10"))

    centre, recentred = recenter(AffineContracted(0.5, 0.25))
    result.checks.append(check_at_most("recentre fixed point", distance(centre, 0.5 * basis(1)), 1e-9))
    result.checks.append(check_true("recentred symbol fixes 0", fixes_origin(recentred, L2, tol=1e-9)))
    result.evidence["first_power_n_below_tol"] = below[0] if below else None
    result.trace = trace
    result.series["power"] = _series(trace, "power")
    result.series["cesaro"] = _series(trace, "cesaro")
    return result


@register(
    "hull-demo",
    "Dictionary-relative polynomial hull of a circle",
    "points where no dictionary function exceeds its sup over A; for a circle in the first coordinate this is its disc",
    {"params": {"radius": 0.5, "circle_points": 64, "max_degree": 3}},
    dictionary=True,
)
def hull_demo(config: ExperimentConfig) -> ExperimentResult:
    result = ExperimentResult("hull-demo", config.seed)
    radius = config.param("radius", 0.5)
    count = config.param("circle_points", 64)
    circle = PointSet.of(
        [basis(1, 2) * complex(radius * np.exp(2j * np.pi * k / count)) for k in range(count)],
        f"circle of radius {radius:g}",
    )
    dictionary = _dictionary(config, monomial_dictionary(2, config.param("max_degree", 3)))
    candidates = {
        "origin": (zeros(2), True),
        "0.6 r e1": (0.6 * radius * basis(1, 2), True),
        "0.6i r e1": (0.6j * radius * basis(1, 2), True),
        "1.4 r e1": (1.4 * radius * basis(1, 2), False),
        "0.5 r e2": (0.5 * radius * basis(2, 2), False),
    }
    membership = {}
    for label, (x, expected) in candidates.items():
        inside = hull_membership(x, circle, dictionary)
        membership[label] = inside
        result.checks.append(check_true(f"{label} {'in' if expected else 'outside'} hull", inside == expected))
    result.evidence["membership"] = membership
    result.evidence["dictionary"] = list(dictionary.labels)
    return result
