"""Recursive template counter and the doubling driver.

The template removes the heavy vertices of the current graph, estimates the
cycles through them with Count-Heavy, keeps every remaining vertex with
probability p and continues on the sample with a threshold shrunk by p**h.
Each level's estimate is scaled back by 1/p**(h*level).

The doubling driver guesses the threshold by halving it until the estimate
is consistent with the guess, and falls back to exact enumeration when no
guess is.
"""
import json
import logging
import math

from hcycles import count_heavy as count_heavy_module
from hcycles import exact
from hcycles import find_heavy as find_heavy_module
from hcycles import graph
from hcycles import matmul
from hcycles import utils
from hcycles.utils import median_of

logger = logging.getLogger(__name__)


def recursion_depth(lam, p, h):
    """Get D(lam) = max(ceil(log_{1/p**h} lam), 0)."""
    if lam <= 1:
        return 0
    return max(int(math.ceil(math.log(lam) / -math.log(p ** h) - 1e-12)), 0)


def template_error_bound(depth, k_const, lam, inner_eps):
    """Get the additive slack 2 * D * K * lam / eps' of a template run."""
    return 2.0 * depth * k_const * lam / inner_eps


class TemplateTrace(object):
    """Per level record of one template run.

    Attributes:
        levels (list of dict): level, lam, vertices (|V| after heavy
            removal), heavy, estimate and seed of every level.
        estimate (float): the final estimate.
        error_bound (float): additive slack of the run.
    """

    def __init__(self):
        self.levels = []
        self.estimate = None
        self.error_bound = None

    def add_level(self, level, lam, vertices, heavy, estimate, seed):
        """Append the record of one level."""
        self.levels.append({
            "level": level,
            "lam": lam,
            "vertices": vertices,
            "heavy": heavy,
            "estimate": estimate,
            "seed": utils.seed_repr(seed),
        })

    def recombined(self, p, h):
        """Get sum of level estimates scaled by 1/p**(h*level)."""
        return sum(record["estimate"] / p ** (h * record["level"])
                   for record in self.levels)

    def as_dict(self):
        """Get the trace as a JSON friendly dict."""
        return {
            "levels": list(self.levels),
            "estimate": self.estimate,
            "error_bound": self.error_bound,
        }


class TemplateCounter(object):
    """Template recursion with replaceable black boxes.

    Args:
        cfg (EstimatorConfig): constants; cfg.h is the cycle length.
        find_heavy (callable): replacement for find_heavy.find_heavy with
            the same signature.
        count_heavy (callable): replacement for count_heavy.count_heavy
            with the same signature.
    """

    def __init__(self, cfg, find_heavy=None, count_heavy=None):
        self.cfg = cfg
        self._find_heavy = find_heavy or find_heavy_module.find_heavy
        self._count_heavy = count_heavy or count_heavy_module.count_heavy

    def band(self, lam, n):
        """Get the Count-Heavy band of threshold lam."""
        upper = lam * 8 * self.cfg.heaviness_slack(n) / self.cfg.eps ** 2
        lower = min(lam / self.cfg.light_divisor(n), upper)
        return count_heavy_module.HeavyBand(lower, upper)

    def run(self, g, lam, rng_seed, wc=None):
        """Estimate the number of h-cycles of g.

        Args:
            g (Graph): input graph.
            lam (float): heaviness threshold of the first level.
            rng_seed: seed.
            wc (WorkCounter): optional work counter.

        Returns:
            tuple: (estimate, TemplateTrace)
        """
        if not lam > 0:
            raise utils.InputError("Heaviness threshold must be positive.")
        cfg = self.cfg
        n = g.n
        h = cfg.h
        p = cfg.keep_probability()
        inner_eps = cfg.inner_eps(n)
        depth = recursion_depth(lam, p, h)
        failsafe = max(int(math.floor(utils.log2n(n))), depth) + 2

        trace = TemplateTrace()
        current = g
        level = 0
        estimate = 0.0
        level_seeds = iter(utils.spawn_seeds(rng_seed, failsafe + 1))
        while True:
            if level > failsafe:
                raise utils.InvariantError(
                    "Template recursion passed depth {}.".format(failsafe))
            lam_level = lam * p ** (h * level)
            level_seed = next(level_seeds)
            find_seed, count_seed, sample_seed = utils.spawn_seeds(
                level_seed, 3)

            heavy = self._find_heavy(current, lam_level, cfg, find_seed, wc)
            t_hat = self._count_heavy(current, heavy, self.band(lam_level, n),
                                      inner_eps, cfg, count_seed, wc)
            rest = graph.VertexSet.from_mask(~heavy.mask(current.n))
            remaining = graph.induced_subgraph(current, rest)
            trace.add_level(level, lam_level, remaining.n, len(heavy),
                            t_hat, level_seed)
            logger.debug("Template level %d lam=%s |V_heavy|=%d t_hat=%s",
                         level, lam_level, len(heavy), t_hat)
            estimate += t_hat / p ** (h * level)

            if lam_level <= 1 or remaining.n == 0:
                break
            current = graph.bernoulli_sample(remaining, p, sample_seed)
            level += 1

        trace.estimate = estimate
        trace.error_bound = template_error_bound(
            depth, cfg.concentration_const(n), lam, inner_eps)
        return estimate, trace


def template(g, lam, cfg, rng_seed, wc=None):
    """Run the template recursion with the default black boxes."""
    return TemplateCounter(cfg).run(g, lam, rng_seed, wc)


class CountReport(object):
    """Result of a doubling run and how it was obtained."""

    def __init__(self, estimate, eps, seed, h, n, cfg):
        self.estimate = estimate
        self.eps = eps
        self.seed = seed
        self.h = h
        self.n = n
        self.cfg = cfg
        self.stopping_i = None
        self.medians = []
        self.trace = None
        self.work = None
        self.fallback = False
        self.inconclusive = False

    def as_dict(self):
        """Get the report as a JSON friendly dict."""
        return {
            "estimate": self.estimate,
            "eps": self.eps,
            "seed": self.seed,
            "h": self.h,
            "n": self.n,
            "scale_mode": self.cfg.scale_mode,
            "stopping_i": self.stopping_i,
            "medians": list(self.medians),
            "trace": self.trace.as_dict() if self.trace else None,
            "work": self.work,
            "fallback": self.fallback,
            "inconclusive": self.inconclusive,
        }

    def to_json(self):
        """Serialize with sorted keys so equal runs give equal text."""
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)


def doubling(g, eps, cfg, rng_seed, wc=None, counter=None):
    """Estimate the number of h-cycles to within a factor 1 +- eps.

    Starting from lam = n**h * eps**2 / Q, every iteration halves lam and
    takes the median of several template runs. The first median that
    reaches n**h / 2**i is returned. Exact enumeration is the fallback.

    Args:
        g (Graph): input graph.
        eps (float): precision, clamped to 1/2.
        cfg (EstimatorConfig): constants; cfg.h is the cycle length.
        rng_seed (int): seed.
        wc (WorkCounter): optional work counter.
        counter (TemplateCounter): template implementation, by default one
            built from cfg.

    Returns:
        CountReport
    """
    cfg = cfg.with_overrides(eps=eps)
    wc = wc if wc is not None else matmul.WorkCounter()
    counter = counter or TemplateCounter(cfg)
    n = g.n
    h = cfg.h
    report = CountReport(None, cfg.eps, utils.seed_repr(rng_seed), h, n, cfg)

    if n == 0:
        report.estimate = 0
        report.stopping_i = 0
        report.work = wc.summary()
        return report

    whole = float(n) ** h
    lam = whole * cfg.eps ** 2 / cfg.heaviness_slack(n)
    iterations = int(math.floor(h * utils.log2n(n)))
    reps = cfg.median_reps(n)
    for i, iteration_seed in enumerate(
            utils.spawn_seeds(rng_seed, iterations + 1)):
        runs = [counter.run(g, lam / 2 ** i, seed, wc)
                for seed in utils.spawn_seeds(iteration_seed, reps)]
        median = median_of(estimate for estimate, _ in runs)
        report.medians.append(median)
        logger.debug("Doubling i=%d lam=%s median=%s", i, lam / 2 ** i,
                     median)
        if median >= whole / 2 ** i:
            logger.info("Doubling stopped at i=%d with estimate %s", i,
                        median)
            report.estimate = median
            report.stopping_i = i
            report.trace = next(trace for estimate, trace in runs
                                if estimate == median)
            report.work = wc.summary()
            return report

    logger.info("No doubling iteration was conclusive, counting exactly")
    report.fallback = True
    try:
        total, _ = exact.brute_force_cycles(g, h, cfg.enumeration_budget)
        report.estimate = total
    except utils.BudgetExceededError as error:
        logger.warning("Exact fallback gave up: %s", error)
        report.inconclusive = True
    report.work = wc.summary()
    return report
