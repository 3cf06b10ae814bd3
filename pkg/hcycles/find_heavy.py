"""Find-Heavy: find every vertex on at least Lambda h-cycles.

A discovery experiment colors the graph with h colors, keeps every vertex
of class i with probability p_i, orients the surviving edges from class i to
class i+1 and reports the vertices still lying on a cycle. Heavy vertices
are discovered often under a suitable probability vector, light vertices
rarely. Vertices are voted in per vector and the union of all votes is
returned.
"""
import itertools
import logging
import math

import numpy as np

from hcycles import exact
from hcycles import graph
from hcycles import matmul
from hcycles import utils

logger = logging.getLogger(__name__)


class SampleVector(object):
    """Keep probabilities p_i = 2**-j_i, one per color class.

    Args:
        exponents (sequence of int): the non-negative exponents j_i.
    """

    def __init__(self, exponents):
        exponents = tuple(int(j) for j in exponents)
        if any(j < 0 for j in exponents):
            raise utils.InputError("Exponents must be non-negative.")
        self.exponents = exponents

    @property
    def h(self):
        """int: number of classes."""
        return len(self.exponents)

    @property
    def p(self):
        """tuple: keep probability of every class."""
        return tuple(2.0 ** -j for j in self.exponents)

    def log_inverse_product(self):
        """Get log2(1 / prod p_i)."""
        return sum(self.exponents)

    def within(self, lam):
        """Check membership in the product set of threshold lam."""
        largest = math.floor(math.log2(lam) + 1)
        return (all(j <= largest for j in self.exponents) and
                2 ** self.log_inverse_product() >= lam)

    def canonical(self):
        """Get the smallest cyclic rotation of this vector."""
        h = self.h
        return min(self.exponents[i:] + self.exponents[:i]
                   for i in range(h))

    def __eq__(self, other):
        if not isinstance(other, SampleVector):
            return NotImplemented
        return self.exponents == other.exponents

    def __hash__(self):
        return hash(self.exponents)

    def __lt__(self, other):
        return self.exponents < other.exponents

    def __repr__(self):
        return "SampleVector({})".format(list(self.exponents))


class DiscoveryTally(object):
    """Per vector counts of how often each vertex was discovered."""

    def __init__(self, n, vectors, reps):
        self.n = n
        self.reps = reps
        self._counts = {vector: np.zeros(n, dtype=np.int64)
                        for vector in vectors}

    def add(self, vector, discovered):
        """Count one experiment of a vector."""
        counts = self._counts[vector]
        counts[discovered.members] += 1
        if discovered.members.size and counts.max() > self.reps:
            raise utils.InvariantError(
                "Vertex discovered more than {} times under {}.".format(
                    self.reps, vector))

    def voted(self, vector, tau):
        """Get the vertices discovered at least tau times under vector."""
        return graph.VertexSet.from_mask(self._counts[vector] >= tau)

    def selected(self, tau):
        """Get the union of votes over all vectors."""
        mask = np.zeros(self.n, dtype=bool)
        for vector in sorted(self._counts):
            votes = self.voted(vector, tau)
            if len(votes):
                logger.debug("%r voted for %d vertices", vector, len(votes))
            mask |= votes.mask(self.n)
        return graph.VertexSet.from_mask(mask)


def product_set(h, lam):
    """Enumerate the dyadic vectors of threshold lam.

    A vector belongs to the set when every p_i is 2**-j with
    0 <= j <= log2(lam) + 1 and prod p_i <= 1 / lam.

    Args:
        h (int): number of classes.
        lam (float): threshold, at least 1.

    Returns:
        list of SampleVector, sorted by exponents.
    """
    if not lam >= 1:
        raise utils.InputError("Product set threshold must be >= 1.")
    largest = int(math.floor(math.log2(lam) + 1))
    vectors = [SampleVector(exponents) for exponents in
               itertools.product(range(largest + 1), repeat=h)]
    return [vector for vector in vectors if vector.within(lam)]


def discovery_chance(h, directed):
    """Get the chance that a uniform coloring lays one h-cycle on the layers.

    The colors have to step up by one, mod h, along the cycle. That holds
    for h of the h**h colorings of a directed cycle and for 2h of an
    undirected one, which can be read in either direction.
    """
    return exact.automorphism_constant(h, directed) / float(h) ** h


def heavy_rate(lam, chance, vectors):
    """Get the expected discovery rate of a vertex on lam cycles.

    The cycles are taken as independent, each discovered with chance times
    the keep product of the likeliest vector.
    """
    keep = 2.0 ** -min(vector.log_inverse_product() for vector in vectors)
    return 1 - math.exp(-lam * chance * keep)


def prune(vectors, lam):
    """Reduce a product set to frontier vectors, one per rotation class.

    A vector is on the frontier when none of its probabilities can be doubled
    without leaving the set. Discovery only gets likelier when a probability
    grows, and a uniform coloring makes rotated vectors behave alike.
    """
    frontier = []
    for vector in vectors:
        doubled = 2 ** (vector.log_inverse_product() - 1)
        if any(vector.exponents) and doubled >= lam:
            continue
        if vector.exponents != vector.canonical():
            continue
        frontier.append(vector)
    return frontier


def p_discovery(g, vector, rng_seed, wc=None,
                entry_bits=matmul.DEFAULT_ENTRY_BITS):
    """Run one discovery experiment.

    Args:
        g (Graph): input graph.
        vector (SampleVector): keep probabilities, one per color class.
        rng_seed: seed.
        wc (WorkCounter): optional work counter.

    Returns:
        VertexSet: vertices of g on a colorful cycle of the sampled layered
            graph.
    """
    h = vector.h
    color_seed, keep_seed = utils.spawn_seeds(rng_seed, 2)
    coloring = graph.random_coloring(g.n, h, color_seed)
    keep_p = np.asarray(vector.p)[coloring.color - 1]
    kept = graph.VertexSet.from_mask(
        utils.make_rng(keep_seed).random(g.n) < keep_p)
    if len(kept) < h:
        return graph.VertexSet()

    sampled = graph.induced_subgraph(g, kept)
    sampled_coloring = coloring.restrict(kept)
    layered = graph.layered_graph(sampled, sampled_coloring)
    if not layered.adj.any():
        return graph.VertexSet()
    found = exact.colorful_vertices(layered, sampled_coloring, wc, entry_bits)
    return graph.VertexSet(kept.members[found.members])


def _pure_coloring_vertices(g, h, reps, rng_seed, wc, entry_bits):
    everyone = SampleVector([0] * h)
    found = np.zeros(g.n, dtype=bool)
    for seed in utils.spawn_seeds(rng_seed, reps):
        found[p_discovery(g, everyone, seed, wc, entry_bits).members] = True
    return graph.VertexSet.from_mask(found)


def find_heavy(g, lam, cfg, rng_seed, wc=None):
    """Find a vertex set containing every vertex with t_G(v) >= lam.

    Args:
        g (Graph): input graph.
        lam (float): heaviness threshold, positive.
        cfg (EstimatorConfig): constants; cfg.h is the cycle length.
        rng_seed: seed.
        wc (WorkCounter): optional work counter.

    Returns:
        VertexSet: vertex ids of g.
    """
    if not lam > 0:
        raise utils.InputError("Heaviness threshold must be positive.")
    h = cfg.h
    n = g.n
    if n < h or not g.adj.any():
        return graph.VertexSet()
    if lam > n ** h or lam > exact.cycle_count_upper_bound(g, h):
        logger.debug("Threshold %s exceeds every possible vertex count", lam)
        return graph.VertexSet()

    reps = cfg.discovery_reps(n)
    if lam <= cfg.const_lambda_cutoff:
        found = _pure_coloring_vertices(g, h, reps, rng_seed, wc,
                                        cfg.entry_bits)
        logger.debug("Pure colorings found %d vertices", len(found))
        return found

    chance = discovery_chance(h, g.directed)
    lam_tilde = max(cfg.lambda_tilde(lam, n, chance), 1.0)
    vectors = product_set(h, lam_tilde)
    if cfg.prune_vectors:
        vectors = prune(vectors, lam_tilde)
    tau = cfg.vote_threshold(reps, heavy_rate(lam, chance, vectors))
    logger.debug("Find-Heavy lam=%s lam_tilde=%s vectors=%d reps=%d tau=%s",
                 lam, lam_tilde, len(vectors), reps, tau)

    tally = DiscoveryTally(n, vectors, reps)
    for vector, vector_seed in zip(vectors,
                                   utils.spawn_seeds(rng_seed, len(vectors))):
        for seed in utils.spawn_seeds(vector_seed, reps):
            tally.add(vector, p_discovery(g, vector, seed, wc,
                                          cfg.entry_bits))
    return tally.selected(tau)
