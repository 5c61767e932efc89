"""
g-distances: the simplex inequality with a symmetric aggregator g in place
of the sum, d(x) <= g(d(x)_1^z, ..., d(x)_n^z).

Properties of g are checked by falsification: draws of nonnegative vectors
mixing uniform, exponential and sparse components, after a few fixed cases
built from basis vectors. A report that holds only means no counterexample
turned up.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.models.domain import Config
from app.models.schemas import GDistanceReport, GPropertyReport
from app.services.core import NDistance, symmetry_identity_failures, tolerance_for
from app.services.elementary import bound
from app.services.errors import ArgumentError, ConfigurationError, PreconditionError
from app.services.spaces import PERMUTATION_STREAM, PROPERTY_STREAM, ConfigSampler, stream
from app.utils.logging import get_logger
from lib.exact_lib import Number, to_json_value

logger = get_logger(__name__)

PROPERTIES = frozenset({"symmetric", "positively_homogeneous", "superadditive", "additive"})

# property sub-streams under PROPERTY_STREAM
_HOMOGENEITY, _SUPERADDITIVITY, _ADDITIVITY, _CONCAVITY, _SYMMETRY = range(5)

MAX_COUNTEREXAMPLES = 20


@dataclass
class GFunction:
    """A symmetric map R^n_+ -> R_+ with the properties it claims to have."""

    arity: int
    fn: Callable[[Tuple[Number, ...]], Number]
    name: str = "g"
    declared_properties: FrozenSet[str] = frozenset({"symmetric"})
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.arity < 2:
            raise ArgumentError("g needs arity >= 2")
        unknown = set(self.declared_properties) - PROPERTIES
        if unknown:
            raise ArgumentError(f"unknown properties {sorted(unknown)}")
        self.declared_properties = frozenset(self.declared_properties)

    def __call__(self, r: Sequence[Number]) -> Number:
        r = tuple(r)
        if len(r) != self.arity:
            raise ArgumentError(f"{self.name} takes {self.arity} values, got {len(r)}")
        return self.fn(r)


def make_weighted_sum_g(lam: Number, n: int) -> GFunction:
    """g(r) = lam * sum(r): additive, homogeneous and superadditive."""
    if lam < 0:
        raise ArgumentError(f"lambda must be >= 0, got {lam}")
    return GFunction(
        arity=n,
        fn=lambda r: lam * sum(r[1:], r[0]),
        name=f"sum*{lam}" if lam != 1 else "sum",
        declared_properties=PROPERTIES,
        params={"lambda": lam},
    )


def make_max_g(n: int) -> GFunction:
    """Largest component: homogeneous, not superadditive."""
    return GFunction(arity=n, fn=max, name="max", declared_properties={"symmetric", "positively_homogeneous"})


def make_scaled_min_g(n: int) -> GFunction:
    """n * smallest component: homogeneous and superadditive, hence concave."""
    return GFunction(
        arity=n,
        fn=lambda r: n * min(r),
        name="n*min",
        declared_properties={"symmetric", "positively_homogeneous", "superadditive"},
    )


def make_squared_sum_g(n: int) -> GFunction:
    """(sum r)^2: superadditive but homogeneous of degree 2, not 1."""
    return GFunction(
        arity=n,
        fn=lambda r: sum(r[1:], r[0]) ** 2,
        name="sum^2",
        declared_properties={"symmetric", "superadditive"},
    )


BUILTIN_G = {
    "sum": lambda n: make_weighted_sum_g(1, n),
    "max": make_max_g,
    "min": make_scaled_min_g,
    "sum2": make_squared_sum_g,
}


def sample_r(rng: np.random.Generator, n: int) -> Tuple[float, ...]:
    """A nonnegative n-vector: uniform, exponential or sparse, chosen at random."""
    kind = int(rng.integers(0, 3))
    if kind == 0:
        r = rng.uniform(0.0, 1.0, size=n)
    elif kind == 1:
        r = rng.exponential(1.0, size=n)
    else:
        r = rng.exponential(1.0, size=n) * (rng.random(n) < 1.0 / n)
        if not r.any():
            r[int(rng.integers(0, n))] = float(rng.exponential(1.0)) + 0.5
    return tuple(float(x) for x in r)


def _basis(n: int, i: int) -> Tuple[int, ...]:
    return tuple(1 if k == i else 0 for k in range(n))


def _basis_pairs(n: int) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    return [(_basis(n, i), _basis(n, j)) for i, j in combinations(range(n), 2)]


def _close(a: Number, b: Number) -> bool:
    tol = tolerance_for(a, b)
    if tol == 0:
        return a == b
    return abs(float(a) - float(b)) <= tol * max(1.0, abs(float(a)), abs(float(b)))


def _at_least(a: Number, b: Number) -> bool:
    """a >= b up to a relative tolerance."""
    tol = tolerance_for(a, b)
    if tol == 0:
        return a >= b
    return float(a) >= float(b) - tol * max(1.0, abs(float(a)), abs(float(b)))


def _report(g: GFunction, prop: str, samples: int, seed: int, counterexample=None, **extra) -> GPropertyReport:
    report = GPropertyReport(
        g_name=g.name,
        property=prop,
        holds=counterexample is None,
        samples=samples,
        seed=seed,
        counterexample=counterexample,
        **extra,
    )
    logger.info("%s %s: holds=%s", g.name, prop, report.holds)
    return report


def _defaults(samples: Optional[int], seed: Optional[int]) -> Tuple[int, int]:
    samples = settings.g_property_samples if samples is None else samples
    seed = settings.seed if seed is None else seed
    if samples < 1:
        raise ArgumentError("samples must be >= 1")
    return samples, seed


def check_symmetric(g: GFunction, samples: int = None, seed: int = None) -> GPropertyReport:
    samples, seed = _defaults(samples, seed)
    for index in range(samples):
        rng = stream(seed, PROPERTY_STREAM, _SYMMETRY, index)
        r = sample_r(rng, g.arity)
        perm = [int(k) for k in rng.permutation(g.arity)]
        lhs, rhs = g(r), g(tuple(r[k] for k in perm))
        if not _close(lhs, rhs):
            return _report(g, "symmetric", samples, seed, {"r": list(r), "permutation": perm, "lhs": to_json_value(lhs), "rhs": to_json_value(rhs)})
    return _report(g, "symmetric", samples, seed)


def check_positively_homogeneous(
    g: GFunction,
    samples: int = None,
    seed: int = None,
    scales: Sequence[float] = (0.5, 2.0, 3.0, 10.0),
) -> GPropertyReport:
    """Falsify g(t r) = t g(r) for t > 0."""
    samples, seed = _defaults(samples, seed)
    cases = [(_basis(g.arity, 0), t) for t in scales]
    for index in range(samples):
        rng = stream(seed, PROPERTY_STREAM, _HOMOGENEITY, index)
        cases.append((sample_r(rng, g.arity), float(scales[index % len(scales)]) * float(rng.uniform(0.5, 2.0))))
    for r, t in cases:
        lhs, rhs = g(tuple(t * x for x in r)), t * g(r)
        if not _close(lhs, rhs):
            return _report(g, "positively_homogeneous", samples, seed,
                           {"r": to_json_value(r), "t": t, "lhs": float(lhs), "rhs": float(rhs)})
    return _report(g, "positively_homogeneous", samples, seed)


def check_superadditive(g: GFunction, samples: int = None, seed: int = None) -> GPropertyReport:
    """Falsify g(r + s) >= g(r) + g(s)."""
    samples, seed = _defaults(samples, seed)
    cases = _basis_pairs(g.arity)
    for index in range(samples):
        rng = stream(seed, PROPERTY_STREAM, _SUPERADDITIVITY, index)
        cases.append((sample_r(rng, g.arity), sample_r(rng, g.arity)))
    for r, s in cases:
        lhs = g(tuple(a + b for a, b in zip(r, s)))
        rhs = g(r) + g(s)
        if not _at_least(lhs, rhs):
            return _report(g, "superadditive", samples, seed,
                           {"r": to_json_value(r), "s": to_json_value(s), "lhs": to_json_value(lhs), "rhs": to_json_value(rhs)})
    return _report(g, "superadditive", samples, seed)


def additive_form_report(g: GFunction, samples: int = None, seed: int = None) -> GPropertyReport:
    """
    Fit lambda = g(e_1) and falsify g(r) = lambda * sum(r).

    Basis and all-ones vectors are tried before the random draws.
    """
    samples, seed = _defaults(samples, seed)
    lam = g(_basis(g.arity, 0))
    cases = [_basis(g.arity, i) for i in range(g.arity)] + [(1,) * g.arity]
    for index in range(samples):
        cases.append(sample_r(stream(seed, PROPERTY_STREAM, _ADDITIVITY, index), g.arity))
    for r in cases:
        lhs, rhs = g(r), lam * sum(r[1:], r[0])
        if not _close(lhs, rhs):
            return _report(g, "additive", samples, seed,
                           {"r": to_json_value(r), "lhs": to_json_value(lhs), "rhs": to_json_value(rhs)},
                           recovered_lambda=None)
    return _report(g, "additive", samples, seed, recovered_lambda=lam)


def check_additive_form(g: GFunction, samples: int = None, seed: int = None) -> Tuple[bool, Optional[Number]]:
    """(True, lambda) when g looks like lambda * sum on every sample, else (False, None)."""
    report = additive_form_report(g, samples, seed)
    return report.holds, report.recovered_lambda


def check_concavity(g: GFunction, samples: int = None, seed: int = None) -> GPropertyReport:
    """
    Falsify midpoint concavity g((r+s)/2) >= (g(r)+g(s))/2.

    Only meaningful for g declared homogeneous and superadditive, for which
    concavity follows; a counterexample refutes one of the declarations.

    Raises:
        ConfigurationError: g does not declare both properties
    """
    missing = {"positively_homogeneous", "superadditive"} - g.declared_properties
    if missing:
        raise ConfigurationError(f"{g.name} does not declare {sorted(missing)}; concavity is not implied")
    samples, seed = _defaults(samples, seed)
    for index in range(samples):
        rng = stream(seed, PROPERTY_STREAM, _CONCAVITY, index)
        r, s = sample_r(rng, g.arity), sample_r(rng, g.arity)
        lhs = g(tuple((a + b) / 2.0 for a, b in zip(r, s)))
        rhs = (g(r) + g(s)) / 2.0
        if not _at_least(lhs, rhs):
            logger.warning("%s: concavity fails, so a declared property is false", g.name)
            return _report(g, "concave", samples, seed,
                           {"r": list(r), "s": list(s), "lhs": float(lhs), "rhs": float(rhs)})
    return _report(g, "concave", samples, seed)


def is_g_distance(
    d: NDistance,
    g: GFunction,
    sampler: Optional[ConfigSampler] = None,
    samples: int = None,
    seed: int = None,
) -> GDistanceReport:
    """
    Sample d(x) <= g(d(x)_1^z, ..., d(x)_n^z) plus conditions (ii) and (iii).

    The registered witnesses of ``d`` are checked first.

    Raises:
        ConfigurationError: arity of g differs from that of d
    """
    if g.arity != d.arity:
        raise ConfigurationError(f"{g.name} is {g.arity}-ary but {d.name} is {d.arity}-ary")
    samples = settings.default_samples if samples is None else samples
    seed = settings.seed if seed is None else seed
    sampler = sampler or d.sampler()

    counterexamples: List[Dict[str, Any]] = []

    def record(condition: str, c: Config, detail: Dict[str, Any]) -> None:
        if len(counterexamples) < MAX_COUNTEREXAMPLES:
            counterexamples.append({"condition": condition, **c.to_json(), **detail})

    cells = [(k, c, stream(seed, PERMUTATION_STREAM, k)) for k, c in enumerate(d.witnesses)]
    for index in range(samples):
        rng = stream(seed, PROPERTY_STREAM, index)
        cells.append((index, sampler.sample(rng), rng))

    for _, c, rng in cells:
        value = d(c.points)
        for condition, where, detail in symmetry_identity_failures(d, c.points, value, rng):
            record(condition, Config(points=where, pivot=c.pivot), {"detail": detail})
        replaced = tuple(d(c.replaced(i)) for i in range(d.arity))
        rhs = g(replaced)
        if not _at_least(rhs, value):
            record("g-simplex", c, {"lhs": to_json_value(value), "rhs": to_json_value(rhs)})

    report = GDistanceReport(
        distance=d.name,
        g_name=g.name,
        passed=not counterexamples,
        samples=samples,
        seed=seed,
        counterexamples=counterexamples,
    )
    logger.info("is_g_distance %s / %s: passed=%s", d.name, g.name, report.passed)
    return report


def bound_g_distance(d: NDistance, g: GFunction, samples: int = None, seed: int = None) -> NDistance:
    """
    x -> d(x)/(1+d(x)), a g-distance whenever d is one and g = lambda * sum
    with lambda >= 1. The result is re-checked by sampling; the report is kept
    in ``metadata["g_report"]``.

    Raises:
        PreconditionError: g is not of additive form, or lambda < 1
    """
    holds, lam = check_additive_form(g, samples, seed)
    if not holds:
        raise PreconditionError(f"{g.name} is not of the form lambda * sum")
    if lam < 1:
        raise PreconditionError(f"{g.name} has lambda = {lam} < 1")
    bounded = bound(d)
    report = is_g_distance(bounded, g, samples=samples, seed=seed)
    if not report.passed:
        logger.warning("bounded %s is not a %s-distance on the samples; is %s one?", d.name, g.name, d.name)
    bounded.metadata["g_report"] = report
    return bounded
