"""Tests for the hcycles command line interface."""

import io
import json

import mock

import tests
from hcycles import cli
from hcycles import exact
from hcycles import graph
from hcycles import utils


class TestConfigParsing(tests.TestCase):
    """Tests for --cfg parsing."""

    def test_values(self):
        """Test value conversion."""
        self.assertIs(True, cli.parse_cfg_value("yes"))
        self.assertIs(False, cli.parse_cfg_value("False"))
        self.assertIsNone(cli.parse_cfg_value("none"))
        self.assertEqual(7, cli.parse_cfg_value("7"))
        self.assertEqual(0.5, cli.parse_cfg_value("0.5"))
        self.assertEqual("paper", cli.parse_cfg_value("paper"))

    def test_overrides(self):
        """Test key=value lists."""
        self.assertEqual({"batch_size": 8, "p_rec": 0.25},
                         cli.parse_cfg_overrides(["batch_size=8",
                                                  "p_rec = 0.25"]))
        self.assertEqual({}, cli.parse_cfg_overrides(None))
        self.assertRaises(utils.InputError, cli.parse_cfg_overrides,
                          ["batch_size"])


class TestCommands(tests.TestCase):
    """Tests for the subcommands, run through main."""

    cheap = ["--cfg", "reps_median=3", "--cfg", "reps_discovery=8",
             "--cfg", "batch_size=8"]

    def setUp(self):
        super(TestCommands, self).setUp()
        self.k4 = self.temp_path("k4.txt")
        graph.write_graph(tests.complete_graph(4), self.k4)

    def run_cli(self, argv):
        """Run main and get the exit code and stdout."""
        with mock.patch("sys.stdout", new_callable=io.StringIO) as out:
            code = cli.main(argv)
        return code, out.getvalue()

    def test_exact(self):
        """Test exact counts in json and csv."""
        code, text = self.run_cli(["exact", "--input", self.k4,
                                   "--per-vertex"])
        self.assertEqual(cli.EXIT_OK, code)
        report = json.loads(text)
        self.assertEqual(4, report["total"])
        self.assertEqual({"0": 3, "1": 3, "2": 3, "3": 3},
                         report["per_vertex"])

        code, text = self.run_cli(["exact", "--input", self.k4, "--h", "4",
                                   "--per-vertex", "--format", "csv"])
        self.assertEqual(["vertex,count", "0,3", "1,3", "2,3", "3,3"],
                         text.splitlines())

        out = self.temp_path("exact.json")
        self.run_cli(["exact", "--input", self.k4, "--out", out])
        with open(out) as report_file:
            self.assertEqual(4, json.load(report_file)["total"])

    def test_input_errors(self):
        """Test exit code 2 for missing and malformed input."""
        missing = self.temp_path("missing.txt")
        self.assertEqual(cli.EXIT_INPUT, self.run_cli(
            ["exact", "--input", missing])[0])
        broken = self.temp_path("broken.txt")
        with open(broken, "w") as broken_file:
            broken_file.write("3 undirected\n0 9\n")
        self.assertEqual(cli.EXIT_INPUT, self.run_cli(
            ["exact", "--input", broken])[0])
        self.assertEqual(cli.EXIT_INPUT, self.run_cli(
            ["approx", "--input", self.k4, "--seed", "1", "--cfg",
             "colour=3"])[0])

    def test_budget(self):
        """Test exit code 3 when enumeration runs out of budget."""
        self.assertEqual(cli.EXIT_BUDGET, self.run_cli(
            ["exact", "--input", self.k4, "--budget", "2"])[0])

    def test_gen_and_find_heavy(self):
        """Test a generated hub instance through find-heavy."""
        path = self.temp_path("hub.txt")
        code, _ = self.run_cli(["gen", "--preset", "hub", "--n", "41", "--t",
                                "20", "--seed", "1", "--out", path])
        self.assertEqual(cli.EXIT_OK, code)
        with open(path + ".json") as sidecar_file:
            truth = json.load(sidecar_file)
        self.assertEqual(20, truth["total"])
        self.assertEqual(1, len(truth["heavy"]))

        code, text = self.run_cli(["find-heavy", "--input", path, "--lam",
                                   "8", "--seed", "6"])
        self.assertEqual(cli.EXIT_OK, code)
        report = json.loads(text)
        self.assertIn(truth["heavy"][0], report["heavy"])
        self.assertGreater(report["work"]["scalar_mults"], 0)

    def test_gen_gadgets(self):
        """Test the gap gadget presets and their checks."""
        path = self.temp_path("blowup.txt")
        code, _ = self.run_cli(["gen", "--preset", "blowup", "--n", "3",
                                "--t", "2", "--density", "0.6", "--seed",
                                "4", "--out", path])
        self.assertEqual(cli.EXIT_OK, code)
        with open(path + ".json") as sidecar_file:
            truth = json.load(sidecar_file)
        self.assertEqual(2 * truth["params"]["triangles"], truth["total"])
        self.assertEqual(truth["total"], exact.brute_force_cycles(
            graph.read_graph(path), 3)[0])

        self.assertEqual(cli.EXIT_INPUT, self.run_cli(
            ["gen", "--preset", "layering", "--n", "2", "--h", "4",
             "--mode", "undirected", "--seed", "1", "--out", path])[0])
        self.assertEqual(cli.EXIT_INPUT, self.run_cli(
            ["gen", "--preset", "hub", "--n", "5", "--seed", "1"])[0])

    def test_count_heavy(self):
        """Test Count-Heavy on a triangle with S = V."""
        triangle = self.temp_path("triangle.txt")
        graph.write_graph(tests.complete_graph(3), triangle)
        s_file = self.temp_path("s.txt")
        with open(s_file, "w") as set_file:
            set_file.write("0 1 2\n")
        code, text = self.run_cli(
            ["count-heavy", "--input", triangle, "--s-file", s_file, "--a",
             "1", "--b", "1", "--seed", "3", "--cfg", "batch_size=200"])
        self.assertEqual(cli.EXIT_OK, code)
        report = json.loads(text)
        self.assertEqual(3, report["size_s"])
        self.assertTrue(0.75 <= report["estimate"] <= 1.25)

    def test_approx(self):
        """Test that approx reports are reproducible."""
        argv = ["approx", "--input", self.k4, "--eps", "0.5", "--seed",
                "5"] + self.cheap
        code, first = self.run_cli(argv)
        self.assertEqual(cli.EXIT_OK, code)
        _, second = self.run_cli(argv)
        self.assertEqual(first, second)
        report = json.loads(first)
        self.assertEqual(4, report["n"])
        self.assertEqual("tuned", report["scale_mode"])

    def test_bench(self):
        """Test the benchmark CSV with an infeasible cell."""
        code, text = self.run_cli(
            ["bench", "--sizes", "12", "--counts", "2", "100", "--preset",
             "disjoint", "--seed", "3"] + self.cheap)
        self.assertEqual(cli.EXIT_OK, code)
        lines = text.splitlines()
        self.assertEqual(",".join(cli.BENCH_COLUMNS), lines[0])
        self.assertEqual(3, len(lines))
        first = dict(zip(cli.BENCH_COLUMNS, lines[1].split(",")))
        self.assertEqual("ok", first["status"])
        self.assertEqual("2", first["oracle"])
        second = dict(zip(cli.BENCH_COLUMNS, lines[2].split(",")))
        self.assertEqual("infeasible", second["status"])
        self.assertEqual("", second["estimate"])

    def test_bench_without_cycles(self):
        """Test that a zero count column falls back to exact zeros."""
        code, text = self.run_cli(
            ["bench", "--sizes", "12", "--counts", "0", "--seed", "3"] +
            self.cheap)
        self.assertEqual(cli.EXIT_OK, code)
        lines = text.splitlines()
        self.assertEqual(2, len(lines))
        row = dict(zip(cli.BENCH_COLUMNS, lines[1].split(",")))
        self.assertEqual("hub", row["preset"])
        self.assertEqual("ok", row["status"])
        self.assertEqual("0", row["estimate"])
        self.assertEqual("0", row["oracle"])
        self.assertEqual("True", row["fallback"])
        self.assertEqual("True", row["success"])

    def test_verify(self):
        """Test the self check and its failure exit code."""
        code, text = self.run_cli(["verify", "--seed", "11", "--instances",
                                   "10", "--max-n", "6"])
        self.assertEqual(cli.EXIT_OK, code)
        self.assertEqual([], json.loads(text)["mismatches"])

        with mock.patch("hcycles.exact.count_t_sigma") as count_mock:
            count_mock.side_effect = (
                lambda g, sigma, *args: exact.PerVertexCounts([1] * g.n))
            code, _ = self.run_cli(["verify", "--seed", "11",
                                    "--instances", "3"])
        self.assertEqual(cli.EXIT_INVARIANT, code)
