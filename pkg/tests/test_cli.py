"""
End-to-end tests of the command line through ``app.main.main``.
"""

import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

FIXTURES_DIR = Path(__file__).parent / "fixtures"


def run_cli(*argv):
    """Run the CLI and return (exit code, stdout, stderr)."""
    from app.main import main

    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


def fields(text):
    """``key: value`` lines as a dict."""
    result = {}
    for line in text.splitlines():
        key, sep, value = line.partition(": ")
        if sep:
            result[key] = value
    return result


class TestCheck(unittest.TestCase):
    """check subcommand."""

    def test_diameter_passes(self):
        code, out, err = run_cli("check", "--distance", "diameter", "--n", 4, "--samples", 500, "--seed", 7)
        self.assertEqual(code, 0, err)
        payload = json.loads(out)
        self.assertTrue(payload["passed"])
        self.assertEqual(payload["k_tested"], "1/3")
        self.assertIn("✓", err)

    def test_area_at_two_points_is_a_usage_error(self):
        code, _, err = run_cli("check", "--distance", "sec_area", "--n", 2)
        self.assertEqual(code, 2)
        self.assertIn("✗", err)

    def test_arity_one_is_a_usage_error(self):
        code, _, _ = run_cli("check", "--distance", "drastic", "--n", 1)
        self.assertEqual(code, 2)

    def test_unknown_distance(self):
        code, _, err = run_cli("check", "--distance", "nope", "--n", 3)
        self.assertEqual(code, 2)
        self.assertIn("unknown distance", err)

    def test_missing_arguments(self):
        code, _, _ = run_cli("check", "--n", 3)
        self.assertEqual(code, 2)


class TestEstimate(unittest.TestCase):
    """estimate subcommand."""

    def test_drastic_payload(self):
        code, out, err = run_cli("estimate", "--distance", "drastic", "--n", 5, "--budget", 200, "--seed", 1)
        self.assertEqual(code, 0, err)
        payload = json.loads(out)
        self.assertEqual(
            list(payload),
            ["distance", "n", "seed", "budget", "best_ratio", "witness", "theoretical", "elapsed_ms"],
        )
        self.assertEqual(payload["best_ratio"], "1/4")
        self.assertEqual(payload["theoretical"], {"exact": "1/4"})

    def test_output_file_is_reproducible(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            payloads = []
            for name in ("a.json", "b.json"):
                path = os.path.join(tmpdir, name)
                code, _, err = run_cli("estimate", "--distance", "sum", "--n", 3, "--budget", 100,
                                       "--seed", 4, "--output", path)
                self.assertEqual(code, 0, err)
                self.assertIn("✓ Wrote", err)
                with open(path) as handle:
                    payload = json.load(handle)
                payload.pop("elapsed_ms")
                payloads.append(payload)
            self.assertEqual(payloads[0], payloads[1])
            self.assertEqual(sorted(os.listdir(tmpdir)), ["a.json", "b.json"])


class TestWitness(unittest.TestCase):
    """witness subcommand."""

    def test_sum(self):
        code, out, _ = run_cli("witness", "--distance", "sum", "--n", 3)
        self.assertEqual(code, 0)
        values = fields(out)
        self.assertEqual(values["ratio"], "1/2")
        self.assertEqual(values["theoretical"], "1/2")
        self.assertEqual(json.loads(values["points"]), [0, 0, 1])

    def test_progression(self):
        code, out, _ = run_cli("witness", "--distance", "ap", "--n", 4)
        self.assertEqual(code, 0)
        self.assertEqual(fields(out)["ratio"], "1")

    def test_area(self):
        code, out, _ = run_cli("witness", "--distance", "sec_area", "--n", 4)
        self.assertEqual(code, 0)
        self.assertAlmostEqual(float(fields(out)["ratio"]), 0.4, delta=1e-12)
        self.assertEqual(fields(out)["theoretical"], "2/5")

    def test_directions_interval(self):
        code, out, _ = run_cli("witness", "--distance", "directions", "--n", 4)
        self.assertEqual(code, 0)
        self.assertEqual(fields(out)["ratio"], "2/5")
        self.assertEqual(fields(out)["theoretical"], "[2/5, 1/2)")


class TestTable(unittest.TestCase):
    """table subcommand."""

    def test_small_table(self):
        code, out, err = run_cli("table", "--n-range", "2-3", "--distances", "drastic,cardinality,directions",
                                 "--budget", 50, "--seed", 3)
        self.assertEqual(code, 0, err)
        lines = out.splitlines()
        self.assertEqual(lines[0], "distance,n,theoretical_lo,theoretical_hi,estimated,witness_ratio,status")
        rows = [line.split(",") for line in lines[1:]]
        # directions starts at n = 3
        self.assertEqual([(r[0], r[1]) for r in rows],
                         [("drastic", "2"), ("drastic", "3"), ("cardinality", "2"), ("cardinality", "3"), ("directions", "3")])
        self.assertEqual(rows[1][4], "1/2")
        self.assertTrue(all(r[6] == "match" for r in rows[:4]))
        self.assertEqual(rows[4][6], "within-bounds")

    def test_json_format(self):
        code, out, _ = run_cli("table", "--n-range", "3", "--distances", "drastic", "--budget", 20, "--format", "json")
        self.assertEqual(code, 0)
        rows = json.loads(out)
        self.assertEqual(rows[0]["distance"], "drastic")
        self.assertEqual(rows[0]["status"], "match")


class TestGeometryCommands(unittest.TestCase):
    """sec and fermat subcommands."""

    def test_sec(self):
        code, out, _ = run_cli("sec", "--points", FIXTURES_DIR / "right_triangle.csv")
        self.assertEqual(code, 0)
        values = fields(out)
        self.assertEqual(json.loads(values["center"]), [2, 0])
        self.assertEqual(values["radius"], "2")
        self.assertEqual(values["radius_sq"], "4")

    def test_fermat(self):
        code, out, _ = run_cli("fermat", "--points", FIXTURES_DIR / "equilateral.csv")
        self.assertEqual(code, 0)
        values = fields(out)
        self.assertAlmostEqual(float(values["value"]), 3 ** 0.5, delta=1e-7)
        self.assertEqual(values["converged"], "true")

    def test_bad_points_file(self):
        code, _, err = run_cli("sec", "--points", FIXTURES_DIR / "bad_points.csv")
        self.assertEqual(code, 2)
        self.assertIn("✗", err)


class TestGraphCommand(unittest.TestCase):
    """graph subcommand."""

    def test_best_constant_on_grid(self):
        code, out, err = run_cli("graph", "--graph", FIXTURES_DIR / "grid3x3.txt", "best-constant")
        self.assertEqual(code, 0, err)
        values = fields(out)
        self.assertEqual(values["best_constant"], "1/2")
        self.assertEqual(values["median"], "true")

    def test_median_check(self):
        code, out, _ = run_cli("graph", "--graph", FIXTURES_DIR / "grid3x3.txt", "median-check")
        self.assertEqual(code, 0)
        self.assertIn("✓ median graph", out)
        code, _, err = run_cli("graph", "--graph", FIXTURES_DIR / "k3.txt", "median-check")
        self.assertEqual(code, 1)
        self.assertIn("not a median graph", err)

    def test_fermat3_table(self):
        code, out, _ = run_cli("graph", "--graph", FIXTURES_DIR / "path3.txt", "fermat3-table")
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], "u,v,w,d_m,median")
        self.assertEqual(len(lines), 11)
        self.assertIn("0,1,2,2,1", lines)

    def test_median_dependent_actions_reject_non_median_graphs(self):
        """Output is still written, but the run fails and names the offending triple."""
        code, out, err = run_cli("graph", "--graph", FIXTURES_DIR / "k3.txt", "best-constant")
        self.assertEqual(code, 1)
        values = fields(out)
        self.assertIn("best_constant", values)
        self.assertEqual(values["median"], "false")
        self.assertIn("triple (0, 1, 2)", err)

        code, out, err = run_cli("graph", "--graph", FIXTURES_DIR / "k3.txt", "fermat3-table")
        self.assertEqual(code, 1)
        self.assertEqual(out.splitlines()[0], "u,v,w,d_m,median")
        self.assertIn("0,1,2,2,", out.splitlines())
        self.assertIn("not a median graph", err)

    def test_graph_actions_respect_exhaustive_cap(self):
        from unittest import mock

        from app.config import settings

        with mock.patch.object(settings, "graph_exhaustive_cap", 4):
            for action in ("median-check", "fermat3-table", "best-constant"):
                code, out, err = run_cli("graph", "--graph", FIXTURES_DIR / "grid3x3.txt", action)
                self.assertEqual(code, 2, action)
                self.assertEqual(out, "")
                self.assertIn("exhaustive cap of 4", err)

    def test_bad_graph_files(self):
        self.assertEqual(run_cli("graph", "--graph", FIXTURES_DIR / "loop.txt", "median-check")[0], 2)
        self.assertEqual(run_cli("graph", "--graph", FIXTURES_DIR / "disconnected.txt", "median-check")[0], 2)

    def test_graph_distance_needs_graph(self):
        code, _, err = run_cli("witness", "--distance", "fermat3_graph", "--n", 3)
        self.assertEqual(code, 2)
        self.assertIn("--graph", err)


if __name__ == "__main__":
    unittest.main()
