"""Count-Heavy: estimate the number of h-cycles meeting a set S.

The estimator splits t_G(S) by the number k of S vertices on a cycle. For
every k, a single vertex of S is picked at random, the rest of the graph is
colored with h-1 colors and the colorful count through that vertex is scaled
up; means of such samples are combined with the median trick.

EstimatorConfig also lives here. It holds every tunable constant of the
package and is shared by find_heavy and template.
"""
import logging
import math
import numbers

from hcycles import exact
from hcycles import graph
from hcycles import matmul
from hcycles import utils

logger = logging.getLogger(__name__)

PAPER = "paper"
TUNED = "tuned"
SCALE_MODES = (PAPER, TUNED)

MAX_EPS = 0.5

DEFAULTS = {
    "h": 3,
    "eps": 0.25,
    "scale_mode": TUNED,
    "Q": 1.0,
    "K_const": 1.0,
    "p_rec": 0.5,
    "reps_median": 5,
    "reps_discovery": 64,
    "czlog": 4.0,
    "eps_divisor": 2.0,
    "batch_size": 32,
    "lambda_slack": 1.0,
    "tau_fraction": 0.15,
    "const_lambda_cutoff": 1.0,
    "enumeration_budget": exact.DEFAULT_ENUMERATION_BUDGET,
    "entry_bits": matmul.DEFAULT_ENTRY_BITS,
    "variance_const": None,
    "prune_vectors": None,
}

_INTEGER_FIELDS = ("h", "reps_median", "reps_discovery", "batch_size",
                   "enumeration_budget", "entry_bits")
_POSITIVE_FIELDS = ("eps", "Q", "K_const", "czlog", "eps_divisor",
                    "lambda_slack", "tau_fraction", "const_lambda_cutoff")


def _is_number(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


class EstimatorConfig(object):
    """Immutable set of estimator constants.

    In ``tuned`` mode the stored fields are used as they are. In ``paper``
    mode the polylog expressions are evaluated from n and h, except for
    fields that were set explicitly, which always win.

    Args:
        **overrides: any key of DEFAULTS.

    Raises:
        InputError: on unknown keys or invalid values.
    """

    def __init__(self, **overrides):
        unknown = sorted(set(overrides) - set(DEFAULTS))
        if unknown:
            raise utils.InputError(
                "Unknown config keys: {}".format(", ".join(unknown)))
        values = dict(DEFAULTS)
        values.update(overrides)
        self._validate(values)
        if values["eps"] > MAX_EPS:
            logger.warning("Clamping eps=%s to %s", values["eps"], MAX_EPS)
            values["eps"] = MAX_EPS
        if values["prune_vectors"] is None:
            values["prune_vectors"] = values["scale_mode"] == TUNED
        object.__setattr__(self, "_values", values)
        object.__setattr__(self, "_explicit", frozenset(overrides))

    @staticmethod
    def _validate(values):
        if values["scale_mode"] not in SCALE_MODES:
            raise utils.InputError(
                "scale_mode must be one of {}".format(SCALE_MODES))
        for key in _INTEGER_FIELDS:
            value = values[key]
            if not _is_number(value) or int(value) != value or value < 1:
                raise utils.InputError(
                    "{} must be a positive integer, got {!r}".format(
                        key, value))
            values[key] = int(value)
        if values["h"] < 3:
            raise utils.InputError("Cycle length h must be at least 3.")
        for key in _POSITIVE_FIELDS:
            if not _is_number(values[key]) or not values[key] > 0:
                raise utils.InputError(
                    "{} must be positive, got {!r}".format(key, values[key]))
        if not _is_number(values["p_rec"]) or not 0 < values["p_rec"] < 1:
            raise utils.InputError("p_rec must lie strictly in (0, 1).")
        variance = values["variance_const"]
        if variance is not None and not (_is_number(variance) and
                                         variance > 0):
            raise utils.InputError("variance_const must be positive.")
        if values["prune_vectors"] not in (None, True, False):
            raise utils.InputError("prune_vectors must be a boolean.")

    def __getattr__(self, name):
        if name.startswith("_"):
            raise AttributeError(name)
        try:
            return self._values[name]
        except KeyError:
            raise AttributeError(name)

    def __setattr__(self, name, value):
        raise AttributeError("EstimatorConfig is immutable.")

    def __getstate__(self):
        return {"values": self._values, "explicit": self._explicit}

    def __setstate__(self, state):
        object.__setattr__(self, "_values", state["values"])
        object.__setattr__(self, "_explicit", state["explicit"])

    def __eq__(self, other):
        if not isinstance(other, EstimatorConfig):
            return NotImplemented
        return self._values == other._values

    def __hash__(self):
        return hash(tuple(sorted(self._values.items())))

    def __repr__(self):
        return "EstimatorConfig({})".format(", ".join(
            "{}={!r}".format(k, v) for k, v in sorted(self._values.items())))

    def with_overrides(self, **overrides):
        """Get a copy with some fields replaced."""
        values = {key: self._values[key] for key in self._explicit}
        values.update(overrides)
        return EstimatorConfig(**values)

    def as_dict(self):
        """Get all fields as a plain dict."""
        return dict(self._values)

    def _from_formula(self, key):
        return self.scale_mode == PAPER and key not in self._explicit

    def heaviness_slack(self, n):
        """Get Q, 8 log^4 n in paper mode."""
        if self._from_formula("Q"):
            return 8 * utils.log2n(n) ** 4
        return self.Q

    def concentration_const(self, n):
        """Get the template constant K, log^2 n / 16 in paper mode."""
        if self._from_formula("K_const"):
            return utils.log2n(n) ** 2 / 16
        return self.K_const

    def keep_probability(self):
        """Get the recursion keep probability p."""
        if self._from_formula("p_rec"):
            return 0.5
        return self.p_rec

    def median_reps(self, n):
        """Get the number of median trick repetitions."""
        if self._from_formula("reps_median"):
            return int(math.ceil(400 * utils.log2n(n)))
        return self.reps_median

    def discovery_reps(self, n):
        """Get the number of Find-Heavy experiments per vector."""
        if self._from_formula("reps_discovery"):
            return int(math.ceil(utils.log2n(n) ** 4))
        return self.reps_discovery

    def light_divisor(self, n):
        """Get czlog, the divisor of the lower heaviness bound."""
        if self._from_formula("czlog"):
            return utils.log2n(n) ** (self.h ** 2)
        return self.czlog

    def inner_eps(self, n):
        """Get the Count-Heavy precision eps' used by the template."""
        if self._from_formula("eps_divisor"):
            return self.eps / (4 * utils.log2n(n))
        return self.eps / self.eps_divisor

    def batch_length(self, band, delta):
        """Get the number of samples averaged in one batch."""
        if self._from_formula("batch_size"):
            constant = variance_constant(self.h, self)
            return max(1, int(math.ceil(
                3 * constant * band.b / (band.a * delta))))
        return self.batch_size

    def lambda_tilde(self, lam, n, chance):
        """Get the reduced threshold searched by Find-Heavy.

        In tuned mode the threshold is picked so that a vertex on lam cycles
        is discovered in 2 to 4 times tau_fraction of the experiments under
        the searched vectors.

        Args:
            lam (float): heaviness threshold.
            n (int): graph size.
            chance (float): probability that a uniform coloring lays one
                fixed h-cycle along the layers.
        """
        if self._from_formula("lambda_slack"):
            h = self.h
            s = float(h) ** -h
            slack = (2 * h * utils.log2n(n)) ** ((h - 1) ** 2) * 2 / s
            return lam / slack
        return lam * chance / (4 * self.tau_fraction * self.lambda_slack)

    def vote_threshold(self, reps, heavy_rate):
        """Get the number of discoveries out of reps needed for a vote.

        Args:
            reps (int): experiments per vector.
            heavy_rate (float): expected discovery rate of a vertex on
                exactly lam cycles. Tuned mode votes at half of it.
        """
        if self._from_formula("tau_fraction"):
            h = self.h
            s = float(h) ** -h
            return reps * (1 - 1 / math.e) ** (h - 1) * s / 4
        return max(1, int(math.ceil(reps * heavy_rate / 2)))


class HeavyBand(object):
    """Bounds a <= t_G(v) <= b promised for every v in S."""

    def __init__(self, a, b):
        if not 0 < a <= b:
            raise utils.InputError(
                "A heavy band needs 0 < a <= b, got a={}, b={}".format(a, b))
        self.a = float(a)
        self.b = float(b)

    def as_dict(self):
        """Get the band as a dict."""
        return {"a": self.a, "b": self.b}

    def __repr__(self):
        return "HeavyBand(a={}, b={})".format(self.a, self.b)


def vertex_scale(h):
    """Get q = (h-1)! / (h-1)**(h-1).

    q is the probability that h-1 fixed vertices receive h-1 distinct
    colors out of h-1.
    """
    return math.factorial(h - 1) / float((h - 1) ** (h - 1))


def variance_constant(h, cfg=None):
    """Get the variance constant C, 1/q**2 unless configured."""
    if cfg is not None and cfg.variance_const is not None:
        return cfg.variance_const
    return 1 / vertex_scale(h) ** 2


def approx_vertex_tk(g, h, s, k, v, rng_seed, wc=None,
                     entry_bits=matmul.DEFAULT_ENTRY_BITS):
    """Unbiased estimate of t^k(v), the h-cycles through v meeting S k times.

    v gets color h, every other vertex a uniform color in 1..h-1, and the
    colorful count through v is divided by q = vertex_scale(h).

    Args:
        g (Graph): input graph.
        h (int): cycle length.
        s (VertexSet): the set S.
        k (int): intersection size.
        v (int): vertex of S.
        rng_seed: seed for the coloring.
        wc (WorkCounter): optional work counter.

    Returns:
        float
    """
    if v not in s:
        raise utils.InputError("Vertex {} is not in S.".format(v))
    rng = utils.make_rng(rng_seed)
    color = rng.integers(1, h, size=g.n)
    color[v] = h
    coloring = graph.Coloring(color, h)
    counts = exact.count_colorful_k(g, coloring, s, k, wc, entry_bits)
    return counts[v] / vertex_scale(h)


def approx_E_tk(g, h, s, k, rng_seed, wc=None,
                entry_bits=matmul.DEFAULT_ENTRY_BITS):
    """Unbiased estimate of t^k, the h-cycles meeting S exactly k times.

    A uniform vertex u of S is estimated with approx_vertex_tk and scaled by
    |S|/k.
    """
    # pylint: disable=invalid-name
    if not len(s):
        raise utils.InputError("Cannot sample from an empty S.")
    pick_seed, color_seed = utils.spawn_seeds(rng_seed, 2)
    members = s.members
    u = int(members[utils.make_rng(pick_seed).integers(len(members))])
    sample = approx_vertex_tk(g, h, s, k, u, color_seed, wc, entry_bits)
    return sample * len(members) / k


def approx_tk(g, s, k, band, delta, cfg, rng_seed, wc=None):
    """Median of means estimate of t^k.

    Args:
        g (Graph): input graph.
        s (VertexSet): non-empty set S.
        k (int): intersection size.
        band (HeavyBand): bounds on t_G(v) for v in S.
        delta (float): relative precision in (0, 1], in units of t_G(S).
        cfg (EstimatorConfig): constants; cfg.h is the cycle length.
        rng_seed: seed.
        wc (WorkCounter): optional work counter.

    Returns:
        float
    """
    if not 0 < delta <= 1:
        raise utils.InputError("delta must lie in (0, 1], got {}".format(
            delta))
    reps = cfg.median_reps(g.n)
    length = cfg.batch_length(band, delta)
    batch_seeds = utils.spawn_seeds(rng_seed, reps)
    means = []
    for batch_seed in batch_seeds:
        samples = [
            approx_E_tk(g, cfg.h, s, k, seed, wc, cfg.entry_bits)
            for seed in utils.spawn_seeds(batch_seed, length)]
        means.append(sum(samples) / length)
    return utils.median_of(means)


def count_heavy(g, s, band, eps, cfg, rng_seed, wc=None):
    """Estimate t_G(S), the number of h-cycles with a vertex in S.

    Args:
        g (Graph): input graph.
        s (VertexSet): vertices whose cycle counts all lie in the band.
        band (HeavyBand): promised bounds a <= t_G(v) <= b.
        eps (float): precision, clamped to 1/2.
        cfg (EstimatorConfig): constants; cfg.h is the cycle length.
        rng_seed: seed.
        wc (WorkCounter): optional work counter.

    Returns:
        float: estimate of t_G(S), 0 for an empty S.
    """
    if not len(s):
        return 0.0
    s.check_within(g.n)
    if not eps > 0:
        raise utils.InputError("eps must be positive, got {}".format(eps))
    eps = min(eps, MAX_EPS)
    estimate = 0.0
    # No cycle meets S more than |S| times.
    strata = min(cfg.h, len(s))
    for k, k_seed in enumerate(utils.spawn_seeds(rng_seed, cfg.h), 1):
        if k > strata:
            break
        estimate += approx_tk(g, s, k, band, eps / (2 * k), cfg, k_seed, wc)
    logger.debug("Count-Heavy |S|=%d band=%r estimate=%s", len(s), band,
                 estimate)
    return estimate
