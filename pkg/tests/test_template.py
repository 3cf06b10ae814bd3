"""Unit tests for the template recursion and the doubling driver."""

import json

import mock

import tests
from hcycles import count_heavy
from hcycles import exact
from hcycles import graph
from hcycles import hardness
from hcycles import matmul
from hcycles import template
from hcycles import utils


def exact_find_heavy(g, lam, cfg, rng_seed, wc=None):
    """Find-Heavy stand-in that returns exactly the heavy vertices."""
    # pylint: disable=unused-argument
    _, per_vertex = exact.brute_force_cycles(g, cfg.h)
    return graph.VertexSet(v for v, c in enumerate(per_vertex) if c >= lam)


def exact_count_heavy(g, s, band, eps, cfg, rng_seed, wc=None):
    """Count-Heavy stand-in that counts cycles meeting s exactly."""
    # pylint: disable=unused-argument,too-many-arguments
    in_s = set(s)
    return sum(1 for cycle in exact.enumerate_cycles(g, cfg.h)
               if in_s.intersection(cycle))


def metered_count_heavy(g, s, band, eps, cfg, rng_seed, wc=None):
    """Exact Count-Heavy stand-in charged one 1 x n x n product per call."""
    # pylint: disable=too-many-arguments
    if len(s) and wc is not None:
        wc.record(1, g.n, g.n)
    return exact_count_heavy(g, s, band, eps, cfg, rng_seed, wc)


class FixedCounter(object):
    """Template counter that always returns the same estimate."""

    def __init__(self, value):
        self.value = value
        self.lams = []

    def run(self, g, lam, rng_seed, wc=None):
        # pylint: disable=unused-argument
        self.lams.append(lam)
        return self.value, template.TemplateTrace()


class TestTemplateHelpers(tests.TestCase):
    """Tests for depth, error bound and band helpers."""

    def test_recursion_depth(self):
        """Test the depth in powers of 1/p**h."""
        self.assertEqual(0, template.recursion_depth(1, 0.5, 3))
        self.assertEqual(0, template.recursion_depth(0.3, 0.5, 3))
        self.assertEqual(1, template.recursion_depth(8, 0.5, 3))
        self.assertEqual(2, template.recursion_depth(9, 0.5, 3))
        self.assertEqual(2, template.recursion_depth(64, 0.5, 3))

    def test_error_bound(self):
        """Test the additive slack formula."""
        self.assertEqual(64, template.template_error_bound(2, 1, 8, 0.5))
        self.assertEqual(0, template.template_error_bound(0, 1, 8, 0.5))

    def test_band(self):
        """Test the tuned Count-Heavy band."""
        counter = template.TemplateCounter(count_heavy.EstimatorConfig())
        band = counter.band(8, 100)
        self.assertEqual(2, band.a)
        self.assertEqual(8 * 8 / 0.25 ** 2, band.b)

    def test_median_reexported(self):
        """Test that the median helper is available from the template."""
        self.assertIs(utils.median_of, template.median_of)


class TestTemplateCounter(tests.TestCase):
    """Tests for TemplateCounter.run."""

    def setUp(self):
        super(TestTemplateCounter, self).setUp()
        self.cfg = count_heavy.EstimatorConfig()
        self.counter = template.TemplateCounter(
            self.cfg, exact_find_heavy, exact_count_heavy)

    def test_exact_boxes_are_exact(self):
        """Test that exact black boxes at the lightest threshold are exact.

        With lam at the smallest positive vertex count every cycle vertex is
        heavy on the first level, so nothing is left to sample.
        """
        checked = 0
        for seed in range(10):
            g = tests.random_graph(8, 0.5, graph.UNDIRECTED, seed)
            total, per_vertex = exact.brute_force_cycles(g, 3)
            if not total:
                continue
            lam = min(c for c in per_vertex if c)
            estimate, trace = self.counter.run(g, lam, seed)
            self.assertEqual(total, estimate)
            self.assertEqual(len(per_vertex.support()),
                             trace.levels[0]["heavy"])
            checked += 1
        self.assertGreater(checked, 0)

    def test_exact_boxes_on_planted(self):
        """Test exact black boxes on every planted preset."""
        instances = [
            hardness.plant_instance(12, 3, 4, "disjoint", 1),
            hardness.plant_instance(12, 3, 3, "random", 2, noise=0.2),
            hardness.plant_instance(13, 3, 6, "hub", 3),
            hardness.plant_instance(10, 3, 4, "gadget", 4),
            hardness.plant_instance(9, 3, 0, "witness", 5, shared=False),
        ]
        for seed, (g, truth) in enumerate(instances):
            lam = min(c for c in truth.per_vertex if c)
            estimate, _ = self.counter.run(g, lam, seed)
            self.assertEqual(truth.total, estimate)

    def test_trace(self):
        """Test level records and their recombination."""
        g = tests.complete_graph(6)
        estimate, trace = self.counter.run(g, 30, 2)
        p, h = self.cfg.keep_probability(), self.cfg.h
        self.assertEqual(estimate, trace.estimate)
        self.assertAlmostEqual(estimate, trace.recombined(p, h))
        self.assertGreater(len(trace.levels), 1)
        previous = g.n
        for index, record in enumerate(trace.levels):
            self.assertEqual(index, record["level"])
            self.assertAlmostEqual(30 * p ** (h * index), record["lam"])
            self.assertLessEqual(record["vertices"], previous)
            previous = record["vertices"]
        self.assertTrue(trace.levels[-1]["lam"] <= 1 or
                        trace.levels[-1]["vertices"] == 0)
        self.assertEqual(template.template_error_bound(
            2, 1, 30, 0.125), trace.error_bound)
        json.dumps(trace.as_dict())

    def test_deterministic(self):
        """Test that the default boxes are reproducible."""
        cfg = count_heavy.EstimatorConfig(reps_discovery=8, batch_size=4,
                                          reps_median=3)
        g = tests.complete_graph(5)
        first = template.template(g, 4, cfg, 12)
        second = template.template(g, 4, cfg, 12)
        self.assertEqual(first[0], second[0])
        self.assertEqual(first[1].as_dict(), second[1].as_dict())

    @mock.patch("hcycles.graph.bernoulli_sample")
    @mock.patch("hcycles.template.recursion_depth")
    def test_failsafe(self, depth_mock, sample_mock):
        """Test that a runaway recursion raises an invariant error."""
        depth_mock.return_value = 0
        sample_mock.side_effect = lambda g, p, seed: g
        counter = template.TemplateCounter(
            self.cfg, lambda *args: graph.VertexSet(),
            lambda *args: 0.0)
        self.assertRaises(utils.InvariantError, counter.run,
                          tests.complete_graph(8), 1e9, 0)

    def test_invalid_threshold(self):
        """Test that lam must be positive."""
        self.assertRaises(utils.InputError, self.counter.run,
                          tests.complete_graph(3), 0, 1)


class TestDoubling(tests.TestCase):
    """Tests for the doubling driver and its reports."""

    def setUp(self):
        super(TestDoubling, self).setUp()
        self.cfg = count_heavy.EstimatorConfig()

    def test_exact_boxes_on_k5(self):
        """Test that exact boxes stop once lam reaches the vertex counts."""
        counter = template.TemplateCounter(
            self.cfg, exact_find_heavy, exact_count_heavy)
        report = template.doubling(tests.complete_graph(5), 0.25, self.cfg,
                                   1, counter=counter)
        self.assertEqual(10, report.estimate)
        self.assertEqual(4, report.stopping_i)
        self.assertEqual(5, len(report.medians))
        self.assertFalse(report.fallback)

    def test_stops_on_first_consistent_median(self):
        """Test the stopping rule with a fixed estimate."""
        counter = FixedCounter(100.0)
        report = template.doubling(tests.complete_graph(8), 0.25, self.cfg,
                                   3, counter=counter)
        self.assertEqual(3, report.stopping_i)
        self.assertEqual(100.0, report.estimate)
        self.assertEqual([100.0] * 4, report.medians)
        lam = 512 * 0.25 ** 2
        self.assertEqual(lam / 8, counter.lams[-1])
        self.assertEqual(4 * self.cfg.median_reps(8), len(counter.lams))

        whole = FixedCounter(512.0)
        self.assertEqual(0, template.doubling(
            tests.complete_graph(8), 0.25, self.cfg, 3,
            counter=whole).stopping_i)

    def test_exact_fallback(self):
        """Test that a cycle free graph falls back to an exact zero."""
        report = template.doubling(graph.Graph.empty(6), 0.25, self.cfg, 4)
        self.assertTrue(report.fallback)
        self.assertFalse(report.inconclusive)
        self.assertEqual(0, report.estimate)

    def test_empty_graph(self):
        """Test that the empty graph has no cycles."""
        report = template.doubling(graph.Graph.empty(0), 0.25, self.cfg, 4)
        self.assertEqual(0, report.estimate)
        self.assertEqual(0, report.stopping_i)

    @mock.patch("hcycles.exact.brute_force_cycles")
    def test_inconclusive(self, brute_mock):
        """Test that an exhausted fallback budget is reported."""
        brute_mock.side_effect = utils.BudgetExceededError("too big")
        report = template.doubling(tests.complete_graph(6), 0.25, self.cfg,
                                   5, counter=FixedCounter(0.0))
        self.assertTrue(report.fallback)
        self.assertTrue(report.inconclusive)
        self.assertIsNone(report.estimate)

    def test_report_json(self):
        """Test that equal seeds give byte equal reports."""
        cfg = count_heavy.EstimatorConfig(reps_discovery=8, batch_size=8,
                                          reps_median=3)
        g = tests.complete_graph(4)
        first = template.doubling(g, 0.5, cfg, 21).to_json()
        second = template.doubling(g, 0.5, cfg, 21).to_json()
        self.assertEqual(first, second)
        report = json.loads(first)
        self.assertEqual(0.5, report["eps"])
        self.assertEqual({"entropy": 21, "spawn_key": []}, report["seed"])
        for key in ("estimate", "stopping_i", "medians", "trace", "work",
                    "fallback", "inconclusive"):
            self.assertIn(key, report)

    def test_end_to_end_stopping_rule(self):
        """Test that a real run either stops consistently or counts exactly.
        """
        cfg = count_heavy.EstimatorConfig(reps_discovery=16, batch_size=16,
                                          reps_median=3)
        g = tests.complete_graph(5)
        report = template.doubling(g, 0.25, cfg, 8)
        if report.fallback:
            self.assertEqual(10, report.estimate)
        else:
            whole = 125.0
            self.assertGreaterEqual(report.estimate,
                                    whole / 2 ** report.stopping_i)
            self.assertEqual(report.medians[-1], report.estimate)
        self.assertGreater(report.work["scalar_mults"], 0)


class TestDoublingOnPlanted(tests.TestCase):
    """Seeded rate and trend tests of doubling on planted instances."""

    def stopping_index(self, t, seed):
        """Get the doubling report with exact boxes on disjoint triangles."""
        cfg = count_heavy.EstimatorConfig()
        g, _ = hardness.plant_instance(16, 3, t, "disjoint", seed)
        counter = template.TemplateCounter(cfg, exact_find_heavy,
                                           exact_count_heavy)
        return template.doubling(g, 0.25, cfg, seed, counter=counter)

    def test_stopping_index_falls_as_cycles_grow(self):
        """Test that more cycles stop the doubling earlier.

        With n = 16 the last iteration searches lam = 1/16, where a single
        triangle just passes the stopping rule.
        """
        for seed in range(3):
            single = self.stopping_index(1, seed)
            several = self.stopping_index(5, seed)
            self.assertEqual(1, single.estimate)
            self.assertEqual(12, single.stopping_i)
            self.assertEqual(5, several.estimate)
            self.assertEqual(10, several.stopping_i)
            self.assertFalse(single.fallback or several.fallback)

    def test_work_falls_as_cycles_grow(self):
        """Test that the Count-Heavy work does not grow with t."""
        cfg = count_heavy.EstimatorConfig(reps_median=3)
        counter = template.TemplateCounter(cfg, exact_find_heavy,
                                           metered_count_heavy)
        work = {}
        for t in (1, 8, 64):
            totals = []
            for seed in range(3):
                g, _ = hardness.plant_instance(192, 3, t, "disjoint", seed)
                wc = matmul.WorkCounter()
                template.doubling(g, 0.25, cfg, seed, wc=wc, counter=counter)
                totals.append(wc.scalar_mults)
            work[t] = utils.median_of(totals)
        self.assertGreater(work[1], work[8])
        self.assertGreater(work[8], work[64])

    def test_accuracy_rate(self):
        """Test that most seeds estimate three triangles within eps."""
        cfg = count_heavy.EstimatorConfig(batch_size=16)
        g, truth = hardness.plant_instance(9, 3, 3, "disjoint", 2)
        hits = 0
        for seed in range(8):
            report = template.doubling(g, 0.25, cfg, seed)
            hits += abs(report.estimate - truth.total) <= 0.25 * truth.total
        self.assertGreaterEqual(hits, 7)
