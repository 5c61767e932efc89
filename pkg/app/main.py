"""
N-Distance Lab - command line entry point.

    python -m app check    --distance diameter --n 4 --samples 10000 --seed 7
    python -m app estimate --distance drastic --n 5 --budget 1000 --seed 1
    python -m app witness  --distance sec_area --n 4
    python -m app table    --n-range 2-6 --output constants.csv
    python -m app fermat   --points triangle.csv
    python -m app sec      --points triangle.csv
    python -m app graph    --graph grid.txt best-constant

Exit codes: 0 success, 1 mathematical violation or negative finding,
2 usage, parse or configuration error.
"""

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from itertools import combinations_with_replacement
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from app.config import settings
from app.models.domain import TheoreticalK
from app.models.schemas import RunConfig, TableRow, TableStatus, render
from app.services import fermat, geometry
from app.services.core import estimate_best_constant, simplex_ratio, tolerance_for, verify_axioms, verify_simplex
from app.services.errors import (
    AxiomViolationError,
    ConfigurationError,
    EvaluationError,
    NDistanceError,
    NotMedianError,
)
from app.services.registry import MIN_ARITY, canonical_name, make_distance
from app.utils.logging import get_logger
from lib.exact_lib import format_number, parse_number, to_json_value

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

TABLE_DISTANCES = (
    "drastic", "cardinality", "diameter", "sum", "arithmetic_mean", "ap",
    "sec_radius", "sec_area", "directions", "fermat_euclidean",
)
TABLE_HEADER = ["distance", "n", "theoretical_lo", "theoretical_hi", "estimated", "witness_ratio", "status"]


# =============================================================================
# Output helpers
# =============================================================================

def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` through a temp file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def dump_json(payload: Any) -> str:
    return json.dumps(payload, indent=2) + "\n"


def emit(run: RunConfig, text: str) -> None:
    if run.output_path:
        write_atomic(run.output_path, text)
        print(f"✓ Wrote {run.output_path}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _distance(run: RunConfig):
    graph = fermat.load_graph(run.graph_path) if run.graph_path else None
    params = dict(run.space_params)
    params.setdefault("dimension", run.dimension)
    return make_distance(run.distance, run.n, params, graph=graph)


def _theoretical_text(theoretical: Optional[TheoreticalK]) -> str:
    if theoretical is None:
        return "unknown"
    if theoretical.is_exact:
        return format_number(theoretical.lo)
    close = ")" if theoretical.hi_exclusive else "]"
    return f"[{format_number(theoretical.lo)}, {format_number(theoretical.hi)}{close}"


# =============================================================================
# Commands
# =============================================================================

def cmd_check(run: RunConfig) -> int:
    """Sample the axioms, then search for simplex violations at the known constant."""
    d = _distance(run)
    axioms = verify_axioms(d, samples=run.samples, seed=run.seed)
    k = d.theoretical_k.hi if d.theoretical_k is not None else 1
    violations = verify_simplex(d, k, samples=run.samples, seed=run.seed, workers=run.workers)
    payload = {
        "distance": d.name,
        "n": d.arity,
        "seed": run.seed,
        "samples": run.samples,
        "passed": axioms.passed and not violations,
        "axioms": axioms.model_dump(),
        "k_tested": to_json_value(k),
        "violations": [
            {**v.config.to_json(), "lhs": to_json_value(v.lhs), "rhs": to_json_value(v.rhs)}
            for v in violations[:20]
        ],
    }
    emit(run, dump_json(payload))
    if payload["passed"]:
        print(f"✓ {d.name} n={d.arity}: no violations in {run.samples} samples", file=sys.stderr)
        return EXIT_OK
    print(f"✗ {d.name} n={d.arity}: {len(axioms.failures)} axiom failures, "
          f"{len(violations)} simplex violations at K={format_number(k)}", file=sys.stderr)
    return EXIT_VIOLATION


def cmd_estimate(run: RunConfig) -> int:
    d = _distance(run)
    report = estimate_best_constant(d, budget=run.budget, seed=run.seed, workers=run.workers)
    emit(run, dump_json(report.to_payload()))
    if report.violations:
        print(f"✗ {d.name} n={d.arity}: {len(report.violations)} configs exceed "
              f"{_theoretical_text(d.theoretical_k)}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_witness(run: RunConfig) -> int:
    d = _distance(run)
    if not d.witnesses:
        print(f"✗ no witness registered for {d.name}", file=sys.stderr)
        return EXIT_USAGE
    for c in d.witnesses:
        sample = simplex_ratio(d, c)
        print(f"distance: {d.name}")
        print(f"n: {d.arity}")
        print(f"points: {json.dumps(to_json_value(c.points))}")
        print(f"pivot: {json.dumps(to_json_value(c.pivot))}")
        print(f"ratio: {format_number(sample.ratio)}")
        print(f"theoretical: {_theoretical_text(d.theoretical_k)}")
    return EXIT_OK


def table_status(theoretical: TheoreticalK, estimate: Any) -> TableStatus:
    """
    Closed forms must be met exactly (or within tolerance for floats);
    intervals must contain the estimate.
    """
    tol = tolerance_for(estimate, theoretical.lo, theoretical.hi)
    if theoretical.is_exact:
        if tol == 0:
            return TableStatus.MATCH if estimate == theoretical.lo else TableStatus.VIOLATION
        close = abs(float(estimate) - float(theoretical.lo)) <= tol
        return TableStatus.MATCH if close else TableStatus.VIOLATION
    if estimate < theoretical.lo - tol or not theoretical.admits(estimate, tol):
        return TableStatus.VIOLATION
    return TableStatus.WITHIN_BOUNDS


def build_table(
    distances: Sequence[str], n_range: Sequence[int], budget: int, seed: int, workers: int = 1,
) -> List[TableRow]:
    rows = []
    for name in distances:
        name = canonical_name(name)
        for n in n_range:
            if n < MIN_ARITY.get(name, 2):
                continue
            d = make_distance(name, n)
            report = estimate_best_constant(d, budget=budget, seed=seed, workers=workers)
            theoretical = d.theoretical_k
            rows.append(TableRow(
                distance=name,
                n=n,
                theoretical_lo=render(theoretical.lo),
                theoretical_hi=render(theoretical.hi),
                estimated=render(report.best_ratio),
                witness_ratio=render(report.witness_ratio),
                status=table_status(theoretical, report.best_ratio),
            ))
            logger.info("table %s n=%d: %s", name, n, rows[-1].status.value)
    return rows


def cmd_table(run: RunConfig) -> int:
    distances = run.distances or list(TABLE_DISTANCES)
    rows = build_table(distances, run.n_range, run.budget, run.seed, run.workers)
    if run.output_format == "json":
        emit(run, dump_json([row.model_dump(mode="json") for row in rows]))
    else:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(TABLE_HEADER)
        for row in rows:
            writer.writerow(row.as_csv_row())
        emit(run, buffer.getvalue())
    bad = [row for row in rows if row.status == TableStatus.VIOLATION]
    if bad:
        for row in bad:
            print(f"✗ {row.distance} n={row.n}: estimated {row.estimated}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_fermat(run: RunConfig) -> int:
    points = geometry.read_points_file(run.points_path)
    result = fermat.weiszfeld(points)
    print(f"minimizer: {json.dumps([float(c) for c in result.minimizer])}")
    print(f"value: {format_number(result.value)}")
    print(f"iterations: {result.iterations}")
    print(f"converged: {str(result.converged).lower()}")
    if result.anchor is not None:
        print(f"anchor: {result.anchor}")
    if not result.converged:
        print("✗ solver stopped without an optimality certificate", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_sec(run: RunConfig) -> int:
    points = geometry.read_points_file(run.points_path)
    circle = geometry.smallest_enclosing_circle(points, seed=run.seed)
    print(f"center: {json.dumps(to_json_value(circle.center))}")
    print(f"radius: {format_number(circle.radius)}")
    print(f"radius_sq: {format_number(circle.radius_sq)}")
    print(f"support: {json.dumps(to_json_value(circle.support))}")
    return EXIT_OK


def _not_median(problem: NotMedianError) -> int:
    print(f"✗ not a median graph: {problem}", file=sys.stderr)
    return EXIT_VIOLATION


def cmd_graph(run: RunConfig) -> int:
    g = fermat.load_graph(run.graph_path)
    size = g.number_of_nodes()
    # every action scans all vertex triples
    if size > settings.graph_exhaustive_cap:
        raise ConfigurationError(
            f"graph {run.graph_action}: {size} vertices exceeds the exhaustive cap of "
            f"{settings.graph_exhaustive_cap} (ND_GRAPH_EXHAUSTIVE_CAP)"
        )
    dm = fermat.bfs_all_pairs(g)
    problem = fermat.find_non_median_triple(g, dm)

    if run.graph_action == "median-check":
        if problem is None:
            print(f"✓ median graph ({size} vertices)")
            return EXIT_OK
        return _not_median(problem)

    if run.graph_action == "fermat3-table":
        table = fermat.fermat3_table(dm)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["u", "v", "w", "d_m", "median"])
        for u, v, w in combinations_with_replacement(range(size), 3):
            try:
                median = str(fermat.median_vertex(g, dm, u, v, w))
            except NotMedianError:
                median = ""
            writer.writerow([u, v, w, int(table[u, v, w]), median])
        emit(run, buffer.getvalue())
        return EXIT_OK if problem is None else _not_median(problem)

    value, (u, v, w, z) = fermat.graph_best_constant(dm)
    print(f"best_constant: {format_number(value)}")
    print(f"attained_at: u={u} v={v} w={w} z={z}")
    if problem is not None:
        print("median: false")
        return _not_median(problem)
    print("median: true")
    if value != fermat.fermat3_graph_distance(g, dm).theoretical_k.lo:
        print(f"✗ median graph with best constant {format_number(value)}, expected 1/2", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "estimate": cmd_estimate,
    "witness": cmd_witness,
    "table": cmd_table,
    "fermat": cmd_fermat,
    "sec": cmd_sec,
    "graph": cmd_graph,
}


# =============================================================================
# Argument parsing
# =============================================================================

def _parse_n_range(text: str) -> List[int]:
    """``2-6`` or ``2,3,5``."""
    if "-" in text:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",") if part.strip()]


def _parse_space_params(items: Sequence[str]) -> Dict[str, Any]:
    params = {}
    for item in items or []:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ValueError(f"space parameter must be key=value, got {item!r}")
        try:
            params[key.strip()] = parse_number(raw)
        except ValueError:
            params[key.strip()] = raw.strip()
    return params


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="python -m app", description=settings.app_name)
    sub = parser.add_subparsers(dest="command", required=True)

    def distance_options(p, budget=False, samples=False):
        p.add_argument("--distance", required=True, help="distance name or combinator expression")
        p.add_argument("--n", type=int, required=True, help="arity")
        p.add_argument("--space-param", action="append", default=[], metavar="KEY=VALUE",
                       help="sampling space parameter (labels, low, high, coord_max, space)")
        p.add_argument("--dimension", type=int, default=2)
        p.add_argument("--graph", dest="graph_path", help="graph file for graph distances")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--output", dest="output_path")
        if budget:
            p.add_argument("--budget", type=int, default=None)
        if samples:
            p.add_argument("--samples", type=int, default=None)

    distance_options(sub.add_parser("check", help="sample the axioms"), samples=True)
    distance_options(sub.add_parser("estimate", help="estimate the best constant"), budget=True)
    distance_options(sub.add_parser("witness", help="evaluate the registered witness"))

    table = sub.add_parser("table", help="constants table")
    table.add_argument("--n-range", default="2-6")
    table.add_argument("--distances", default="", help="comma-separated subset")
    table.add_argument("--budget", type=int, default=None)
    table.add_argument("--seed", type=int, default=None)
    table.add_argument("--workers", type=int, default=None)
    table.add_argument("--output", dest="output_path")
    table.add_argument("--format", dest="output_format", choices=["csv", "json"], default="csv")

    for name, text in (("fermat", "geometric median of a points file"), ("sec", "smallest enclosing circle")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--points", dest="points_path", required=True)
        p.add_argument("--seed", type=int, default=None)

    graph = sub.add_parser("graph", help="graph Fermat and median tools")
    graph.add_argument("--graph", dest="graph_path", required=True)
    graph.add_argument("graph_action", choices=["median-check", "fermat3-table", "best-constant"])
    graph.add_argument("--output", dest="output_path")
    return parser


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {key: value for key, value in vars(args).items() if value is not None}
    if "space_param" in values:
        values["space_params"] = _parse_space_params(values.pop("space_param"))
    if "n_range" in values:
        values["n_range"] = _parse_n_range(values["n_range"])
    if "distances" in values:
        values["distances"] = [part.strip() for part in values["distances"].split(",") if part.strip()]
    return RunConfig(**values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    try:
        run = run_config_from_args(args)
        return COMMANDS[run.command](run)
    except (ValidationError, ValueError) as exc:
        print(f"✗ {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AxiomViolationError, EvaluationError, NotMedianError) as exc:
        print(f"✗ {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except NDistanceError as exc:
        print(f"✗ {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
