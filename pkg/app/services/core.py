"""
N-distance core.

Defines the NDistance abstraction, evaluates simplex-inequality ratios,
samples the three axioms and searches for best constants.

Every random draw comes from a stream keyed by ``(seed, namespace, index)``;
the search reduces with an index tie-break, so reports do not depend on the
worker count or evaluation order.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, List, Literal, Optional, Sequence, Tuple

from app.config import settings
from app.models.domain import Config, RatioSample, SimplexViolation, TheoreticalK
from app.models.schemas import AxiomFailure, AxiomReport, EstimateReport, OptimizerSettings
from app.services.errors import ArgumentError, AxiomViolationError, EvaluationError
from app.services.spaces import (
    PERMUTATION_STREAM,
    REFINE_STREAM,
    ConfigSampler,
    Space,
    stream,
)
from app.utils.logging import get_logger
from lib.exact_lib import Number, all_exact, exact_div, format_number, is_exact, to_json_value

logger = get_logger(__name__)

MAX_REPORTED_FAILURES = 50
MAX_REPORTED_VIOLATIONS = 20


@dataclass
class NDistance:
    """
    A symmetric nonnegative function of ``arity`` points of ``space``.

    ``zero_rule`` is "constant" for n-distances (zero exactly on constant
    tuples) and "repeated" for hemimetrics (zero exactly when two entries
    coincide). ``witnesses`` are the extremal configs the estimator always
    evaluates before random search.
    """

    name: str
    arity: int
    space: Space
    evaluate: Callable[[Tuple[Any, ...]], Number]
    theoretical_k: Optional[TheoreticalK] = None
    witnesses: Tuple[Config, ...] = ()
    zero_rule: Literal["constant", "repeated"] = "constant"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.arity < 2:
            raise ArgumentError(f"{self.name}: arity must be >= 2, got {self.arity}")

    def __call__(self, points: Sequence[Any]) -> Number:
        points = tuple(points)
        if len(points) != self.arity:
            raise ArgumentError(
                f"{self.name} takes {self.arity} points, got {len(points)}"
            )
        return self.evaluate(points)

    def sampler(self, tie_rate: float = None) -> ConfigSampler:
        return ConfigSampler(self.space, self.arity, tie_rate)


def tolerance_for(*values: Any) -> Number:
    """Zero when every value is exact, the float tolerance otherwise."""
    return 0 if all_exact(values) else settings.float_tolerance


def _is_constant(points: Sequence[Any]) -> bool:
    return all(p == points[0] for p in points)


def _has_repeat(points: Sequence[Any]) -> bool:
    return any(points[i] == points[j] for i in range(len(points)) for j in range(i))


def _check_config(d: NDistance, c: Config) -> None:
    if c.arity != d.arity:
        raise ArgumentError(f"{d.name}: config has {c.arity} points, expected {d.arity}")


def _checked_value(d: NDistance, points: Tuple[Any, ...], c: Config) -> Number:
    value = d(points)
    if not is_exact(value) and not math.isfinite(float(value)):
        raise EvaluationError(f"{d.name} returned non-finite {value!r} on {points!r}", config=c)
    if value < 0:
        raise EvaluationError(f"{d.name} returned negative {value!r} on {points!r}", config=c)
    return value


def eval_replaced(d: NDistance, c: Config, i: int) -> Number:
    """
    Evaluate d(x_1, ..., x_n)_i^z: the tuple with its i-th entry replaced by z.

    ``i`` is 1-based, as in the notation. ``c`` is not modified.

    Raises:
        ArgumentError: index outside 1..n, or config of the wrong arity
    """
    _check_config(d, c)
    if not 1 <= i <= d.arity:
        raise ArgumentError(f"replacement index {i} outside 1..{d.arity}")
    return _checked_value(d, c.replaced(i - 1), c)


def simplex_ratio(d: NDistance, c: Config) -> RatioSample:
    """
    Both sides of the simplex inequality at ``c``.

    The ratio is 0 when the numerator is 0 (0/0 included).

    Raises:
        AxiomViolationError: positive numerator with a vanishing denominator
    """
    _check_config(d, c)
    numerator = _checked_value(d, c.points, c)
    terms = [_checked_value(d, c.replaced(i), c) for i in range(d.arity)]
    denominator = sum(terms[1:], terms[0])
    tol = tolerance_for(numerator, denominator)

    if numerator == 0 or (denominator <= tol and numerator <= tol):
        return RatioSample(config=c, numerator=numerator, denominator=denominator, ratio=0)
    if denominator <= tol:
        raise AxiomViolationError(
            f"{d.name}: d(x)={format_number(numerator)} but every replaced tuple is 0 "
            f"at points={to_json_value(c.points)} pivot={to_json_value(c.pivot)}",
            config=c,
        )
    return RatioSample(
        config=c,
        numerator=numerator,
        denominator=denominator,
        ratio=exact_div(numerator, denominator),
    )


def _map_ordered(fn: Callable[[Any], Any], items: Iterable[Any], workers: int) -> List[Any]:
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _values_differ(a: Number, b: Number) -> bool:
    tol = tolerance_for(a, b)
    if tol == 0:
        return a != b
    return abs(float(a) - float(b)) > max(tol, 1e-12 * max(abs(float(a)), abs(float(b))))


def symmetry_identity_failures(
    d: NDistance, points: Tuple[Any, ...], value: Number, rng
) -> List[Tuple[str, Tuple[Any, ...], str]]:
    """
    Conditions (ii) and (iii) at one tuple, as (condition, points, detail) rows.

    Symmetry is tested on one permutation drawn from ``rng``.
    """
    found = []
    perm = [int(k) for k in rng.permutation(d.arity)]
    permuted_value = d(tuple(points[k] for k in perm))
    if _values_differ(value, permuted_value):
        found.append(("symmetry", points, (
            f"d={format_number(value)} but permutation {perm} gives {format_number(permuted_value)}"
        )))

    constant = tuple(points[0] for _ in points)
    constant_value = d(constant)
    if constant_value > tolerance_for(constant_value):
        found.append(("identity", constant, f"constant tuple evaluates to {format_number(constant_value)}"))
    if d.zero_rule == "constant":
        should_vanish = _is_constant(points)
    else:
        should_vanish = _has_repeat(points)
    if should_vanish and value > tolerance_for(value):
        found.append(("identity", points, f"expected 0, got {format_number(value)}"))
    elif not should_vanish and value <= 0:
        found.append(("identity", points, "nonconstant tuple evaluates to 0"))
    return found


def verify_axioms(
    d: NDistance,
    sampler: Optional[ConfigSampler] = None,
    samples: int = None,
    seed: int = None,
    configs: Sequence[Config] = (),
) -> AxiomReport:
    """
    Sample conditions (i)-(iii) of an n-distance.

    Per sampled config: nonnegativity and finiteness, invariance under a random
    permutation, zero on the constant tuple and positivity on a nonconstant one
    (for hemimetrics: zero exactly on tuples with a repeated entry), and the
    simplex inequality with K = 1. Failures are returned, never raised.
    """
    samples = settings.default_samples if samples is None else samples
    seed = settings.seed if seed is None else seed
    if samples < 1:
        raise ArgumentError("samples must be >= 1")
    sampler = sampler or d.sampler()

    checked = {"nonnegative": 0, "symmetry": 0, "identity": 0, "simplex": 0}
    failures: List[AxiomFailure] = []

    def fail(condition: str, points, pivot=None, detail: str = "") -> None:
        if len(failures) < MAX_REPORTED_FAILURES:
            failures.append(AxiomFailure(
                condition=condition,
                points=to_json_value(tuple(points)),
                pivot=to_json_value(pivot),
                detail=detail,
            ))

    # fixed configs first, then the random ones; each gets its own permutation stream
    cells = list(configs) + sampler.sample_range(seed, samples)
    for index, c in enumerate(cells):
        rng = stream(seed, PERMUTATION_STREAM, index)
        points = c.points

        checked["nonnegative"] += 1
        value = d(points)
        if (not is_exact(value) and not math.isfinite(float(value))) or value < 0:
            fail("nonnegative", points, detail=f"value {value!r}")
            continue

        checked["symmetry"] += 1
        checked["identity"] += 1
        for condition, where, detail in symmetry_identity_failures(d, points, value, rng):
            fail(condition, where, detail=detail)

        checked["simplex"] += 1
        try:
            sample = simplex_ratio(d, c)
        except AxiomViolationError as exc:
            fail("simplex", points, c.pivot, detail=str(exc))
            continue
        if sample.ratio > 1 + tolerance_for(sample.ratio):
            fail("simplex", points, c.pivot, detail=f"ratio {format_number(sample.ratio)} > 1")

    report = AxiomReport(
        distance=d.name,
        arity=d.arity,
        samples=samples,
        seed=seed,
        passed=not failures,
        checked=checked,
        failures=failures,
    )
    logger.info("verify_axioms %s n=%d: passed=%s (%d failures)", d.name, d.arity, report.passed, len(failures))
    return report


def _violation(sample: RatioSample, k: Number) -> Optional[SimplexViolation]:
    rhs = k * sample.denominator
    excess = sample.numerator - rhs
    if excess > tolerance_for(sample.numerator, rhs):
        return SimplexViolation(
            config=sample.config, k_tested=k, lhs=sample.numerator, rhs=rhs, excess=excess
        )
    return None


def verify_simplex(
    d: NDistance,
    k: Number,
    sampler: Optional[ConfigSampler] = None,
    samples: int = None,
    seed: int = None,
    configs: Sequence[Config] = (),
    workers: int = None,
) -> List[SimplexViolation]:
    """
    Search for configs violating the simplex inequality with constant ``k``.

    ``configs`` are checked before the ``samples`` random ones. Returns the
    violations sorted by excess, largest first.

    Raises:
        ArgumentError: k outside (0, 1] or negative sample count
    """
    if not 0 < k <= 1:
        raise ArgumentError(f"k must lie in (0, 1], got {k}")
    samples = settings.default_samples if samples is None else samples
    seed = settings.seed if seed is None else seed
    if samples < 0:
        raise ArgumentError("samples must be >= 0")
    sampler = sampler or d.sampler()
    workers = workers or settings.workers

    def evaluate(c: Config) -> RatioSample:
        return simplex_ratio(d, c)

    ratio_samples = [simplex_ratio(d, c) for c in configs]
    ratio_samples += _map_ordered(evaluate, sampler.sample_range(seed, samples), workers)

    found = []
    for order, sample in enumerate(ratio_samples):
        violation = _violation(sample, k)
        if violation is not None:
            found.append((order, violation))
    found.sort(key=lambda item: (-item[1].excess, item[0]))
    logger.info("verify_simplex %s k=%s: %d violations", d.name, format_number(k), len(found))
    return [violation for _, violation in found]


def _refine(
    d: NDistance,
    sampler: ConfigSampler,
    start: RatioSample,
    rng,
    refine: OptimizerSettings,
) -> Tuple[RatioSample, List[RatioSample], int]:
    """Coordinate-perturbation hill climb; the step halves after ``patience`` failures."""
    current = start
    step = refine.initial_step
    failures = 0
    seen = []
    for _ in range(refine.steps):
        candidate = simplex_ratio(d, sampler.perturb(current.config, rng, step))
        seen.append(candidate)
        if candidate.ratio > current.ratio:
            current = candidate
            failures = 0
        else:
            failures += 1
            if failures >= refine.patience:
                step /= 2.0
                failures = 0
    return current, seen, refine.steps


def _prefer_exact(best: RatioSample, exact: Optional[RatioSample]) -> RatioSample:
    """A float maximum within tolerance of an exact witness ratio is that witness."""
    if exact is None or is_exact(best.ratio):
        return best
    if abs(best.ratio - exact.ratio) <= tolerance_for(best.ratio):
        return exact
    return best


def estimate_best_constant(
    d: NDistance,
    sampler: Optional[ConfigSampler] = None,
    budget: int = None,
    refine: Optional[OptimizerSettings] = None,
    seed: int = None,
    workers: int = None,
) -> EstimateReport:
    """
    Lower-bound the best constant by maximizing the simplex ratio.

    Phases: the registered witnesses, ``budget`` random configs, then a hill
    climb from the top ``refine.starts`` configs. The maximum is a certified
    lower bound on K* up to evaluation tolerance. Configs exceeding the known
    upper value are reported as violations.

    Raises:
        AxiomViolationError: propagated from simplex_ratio
    """
    budget = settings.default_budget if budget is None else budget
    seed = settings.seed if seed is None else seed
    if budget < 1:
        raise ArgumentError("budget must be >= 1")
    refine = refine or OptimizerSettings()
    sampler = sampler or d.sampler()
    workers = workers or settings.workers
    started = time.perf_counter()

    witness_samples = [simplex_ratio(d, c) for c in d.witnesses]

    def evaluate(c: Config) -> RatioSample:
        return simplex_ratio(d, c)

    random_samples = _map_ordered(evaluate, sampler.sample_range(seed, budget), workers)
    ranked = list(enumerate(witness_samples + random_samples))
    logger.info("estimate %s n=%d: %d witnesses, %d random configs", d.name, d.arity, len(witness_samples), budget)

    # max ratio, earliest index wins ties
    ranked.sort(key=lambda item: (-item[1].ratio, item[0]))
    best = ranked[0][1]
    sampled_best = best
    evaluations = len(ranked)

    refined: List[RatioSample] = []
    for start_index, (_, start) in enumerate(ranked[: refine.starts]):
        rng = stream(seed, REFINE_STREAM, start_index)
        result, seen, steps = _refine(d, sampler, start, rng, refine)
        refined.extend(seen)
        evaluations += steps
        if result.ratio > best.ratio:
            logger.debug("refinement start %d improved %s -> %s", start_index, best.ratio, result.ratio)
            best = result

    exact_witness = max(
        (s for s in witness_samples if is_exact(s.ratio)), key=lambda s: s.ratio, default=None
    )
    best = _prefer_exact(best, exact_witness)
    sampled_best = _prefer_exact(sampled_best, exact_witness)

    violations: List[SimplexViolation] = []
    theoretical = d.theoretical_k
    if theoretical is not None:
        candidates = [s for _, s in ranked] + refined
        for sample in candidates:
            if theoretical.admits(sample.ratio, tolerance_for(sample.ratio)):
                continue
            violation = _violation(sample, theoretical.hi) or SimplexViolation(
                config=sample.config,
                k_tested=theoretical.hi,
                lhs=sample.numerator,
                rhs=theoretical.hi * sample.denominator,
                excess=sample.numerator - theoretical.hi * sample.denominator,
            )
            violations.append(violation)
        violations.sort(key=lambda v: -v.excess)
        violations = violations[:MAX_REPORTED_VIOLATIONS]
        if violations:
            logger.warning("estimate %s n=%d: %d configs exceed the known bound", d.name, d.arity, len(violations))

    return EstimateReport(
        distance_name=d.name,
        arity=d.arity,
        budget=budget,
        seed=seed,
        best_ratio=best.ratio,
        witness=best.config,
        sampled_ratio=sampled_best.ratio,
        witness_ratio=max((s.ratio for s in witness_samples), default=None),
        theoretical_k=theoretical.to_json() if theoretical else None,
        violations=violations,
        evaluations=evaluations,
        optimizer=refine,
        elapsed_ms=int((time.perf_counter() - started) * 1000),
    )
