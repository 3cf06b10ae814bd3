"""Exact h-cycle counting.

Three oracles live here: brute force enumeration of cycles, the matrix chain
count over an ordered partition, and per-vertex colorful counting that
stratifies cycles by how many times they meet a vertex set S.
"""
import itertools
import logging

import numpy as np

from hcycles import graph
from hcycles import matmul
from hcycles import utils

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_BUDGET = 5000000


class OrderedPartition(object):
    """Ordered sequence (U_1, ..., U_h) of pairwise disjoint vertex sets."""

    def __init__(self, parts):
        parts = [p if isinstance(p, graph.VertexSet) else graph.VertexSet(p)
                 for p in parts]
        if len(parts) < 3:
            raise utils.InputError("An ordered partition needs h >= 3 parts.")
        seen = set()
        for part in parts:
            members = set(part)
            if seen & members:
                raise utils.InputError("Partition parts must be disjoint.")
            seen |= members
        self.parts = tuple(parts)

    @property
    def h(self):
        """int: number of parts."""
        return len(self.parts)

    def sizes(self):
        """Get the size of every part."""
        return [len(part) for part in self.parts]

    def rotated(self, start):
        """Get the cyclic rotation (U_start, ..., U_h, U_1, ...)."""
        return OrderedPartition(self.parts[start:] + self.parts[:start])

    def check_within(self, n):
        """Raise InputError unless every part lies in range(n)."""
        for part in self.parts:
            part.check_within(n)

    def __repr__(self):
        return "OrderedPartition(sizes={})".format(self.sizes())


def _count_array(counts):
    if not isinstance(counts, np.ndarray):
        counts = np.array([int(c) for c in counts], dtype=object)
    if counts.dtype == bool or counts.dtype.kind == "i":
        return counts.astype(np.int64)
    counts = counts.astype(object)
    if not counts.size:
        return np.zeros(0, dtype=np.int64)
    if counts.max() <= matmul.INT64_LIMIT and counts.min() >= 0:
        return counts.astype(np.int64)
    return counts


class PerVertexCounts(object):
    """Exact per-vertex counts.

    Counts live in an int64 array while they fit and fall back to Python
    integers in an object array when they do not.
    """

    def __init__(self, counts):
        self.counts = _count_array(counts)
        if self.counts.size and self.counts.min() < 0:
            raise utils.InputError("Per-vertex counts must be >= 0.")

    @classmethod
    def zeros(cls, n):
        """Get all zero counts for n vertices."""
        return cls([0] * n)

    def __getitem__(self, vertex):
        return int(self.counts[vertex])

    def __len__(self):
        return int(self.counts.size)

    def __iter__(self):
        return (int(c) for c in self.counts)

    def __add__(self, other):
        if len(self) != len(other):
            raise utils.InputError("Count vectors differ in length.")
        left, right = self.counts, other.counts
        if left.dtype == object or right.dtype == object or (
                left.size and
                int(left.max()) + int(right.max()) > matmul.INT64_LIMIT):
            left, right = left.astype(object), right.astype(object)
        return PerVertexCounts(left + right)

    def __eq__(self, other):
        if not isinstance(other, PerVertexCounts):
            return NotImplemented
        return list(self) == list(other)

    def __hash__(self):
        return hash(tuple(self))

    def total(self):
        """Get the sum over all vertices."""
        return sum(self)

    def support(self):
        """Get the vertices with a positive count."""
        return graph.VertexSet.from_mask(
            np.array([c > 0 for c in self.counts], dtype=bool)
            if self.counts.dtype == object else self.counts > 0)

    def exact_div(self, divisor):
        """Divide every count, requiring exact division.

        Raises:
            InvariantError: if some count is not a multiple of divisor.
        """
        if np.any(self.counts % divisor):
            raise utils.InvariantError(
                "Counts are not divisible by {}: {}".format(
                    divisor, list(self)))
        return PerVertexCounts(self.counts // divisor)

    def as_dict(self):
        """Get {vertex: count} for vertices with a positive count."""
        return {v: c for v, c in enumerate(self) if c}

    def __repr__(self):
        return "PerVertexCounts({})".format(list(self))


def automorphism_constant(h, directed):
    """Get the number of ordered closed walks that describe one h-cycle.

    A directed h-cycle is read from any of its h rotations; an undirected one
    additionally in both directions.
    """
    return h if directed else 2 * h


def enumerate_cycles(g, h, budget=DEFAULT_ENUMERATION_BUDGET):
    """Yield every h-cycle of g exactly once as a vertex tuple.

    Each cycle starts at its smallest vertex. Undirected cycles are yielded
    in the orientation whose second vertex is smaller than its last.

    Args:
        g (Graph): input graph.
        h (int): cycle length, at least 3.
        budget (int): maximum number of path extensions, None for no limit.

    Raises:
        BudgetExceededError: when the search needs more than budget steps.
    """
    if h < 3:
        raise utils.InputError("Cycle length must be at least 3.")
    neighbours = [np.flatnonzero(row) for row in g.adj]
    steps = [0]

    def extend(path, on_path):
        steps[0] += 1
        if budget is not None and steps[0] > budget:
            raise utils.BudgetExceededError(
                "Enumeration of {}-cycles on {} vertices exceeded {} steps."
                .format(h, g.n, budget))
        start, last = path[0], path[-1]
        if len(path) == h:
            if g.adj[last, start] and (g.directed or path[1] < path[-1]):
                yield tuple(path)
            return
        for nxt in neighbours[last]:
            nxt = int(nxt)
            if nxt > start and nxt not in on_path:
                path.append(nxt)
                on_path.add(nxt)
                for cycle in extend(path, on_path):
                    yield cycle
                on_path.discard(nxt)
                path.pop()

    for start in range(g.n):
        for cycle in extend([start], {start}):
            yield cycle


def brute_force_cycles(g, h, budget=DEFAULT_ENUMERATION_BUDGET):
    """Count h-cycles and per-vertex cycle counts by enumeration.

    Args:
        g (Graph): input graph.
        h (int): cycle length.
        budget (int): enumeration step limit, None for no limit.

    Returns:
        tuple: (total, PerVertexCounts).
    """
    total = 0
    per_vertex = [0] * g.n
    for cycle in enumerate_cycles(g, h, budget):
        total += 1
        for vertex in cycle:
            per_vertex[vertex] += 1
    return total, PerVertexCounts(per_vertex)


def brute_force_colorful(g, coloring, s, k,
                         budget=DEFAULT_ENUMERATION_BUDGET):
    """Count colorful h-cycles meeting S exactly k times by enumeration.

    Slow reference for count_colorful_k.
    """
    _check_colorful_args(g, coloring, s, k)
    h = coloring.num_classes
    in_s = set(s)
    counts = [0] * g.n
    for cycle in enumerate_cycles(g, h, budget):
        colorful = len(set(int(coloring.color[v]) for v in cycle)) == h
        if colorful and len(in_s.intersection(cycle)) == k:
            for vertex in cycle:
                counts[vertex] += 1
    return PerVertexCounts(counts)


def brute_force_t_sigma(g, sigma):
    """Count ordered cycles through an ordered partition by enumeration.

    Slow reference for count_t_sigma.
    """
    sigma.check_within(g.n)
    counts = [0] * g.n
    h = sigma.h
    for walk in itertools.product(*(list(part) for part in sigma.parts)):
        if all(g.adj[walk[i], walk[(i + 1) % h]] for i in range(h)):
            for vertex in walk:
                counts[vertex] += 1
    return PerVertexCounts(counts)


def count_t_sigma(g, sigma, wc=None, entry_bits=matmul.DEFAULT_ENTRY_BITS):
    """Count ordered cycles through an ordered partition.

    For v in U_j the result is the number of closed walks (v_1, ..., v_h)
    with v_i in U_i, v_j = v and an edge v_i -> v_{i+1} for every i
    (indices mod h).

    The partition is first rotated so that its smallest part comes first;
    rotating the sequence does not change any per-vertex count, and then
    every product has the smallest part size as one of its dimensions.
    With U_1 the smallest part, F_i[x, y] counts paths x -> ... -> y from
    U_1 to U_i and R_i[x, y] counts paths y -> ... -> x from U_{h-i+1} back
    to U_1. The count of v in U_j is then sum_x F_j[x, v] * R_{h-j+1}[x, v],
    the diagonal of F_j^T R_{h-j+1}. Only that diagonal is computed.

    Args:
        g (Graph): input graph, either mode.
        sigma (OrderedPartition): parts over the vertices of g.
        wc (WorkCounter): optional work counter.
        entry_bits (int): count width limit.

    Returns:
        PerVertexCounts: counts for every vertex of g, zero outside sigma.
    """
    sigma.check_within(g.n)
    sizes = sigma.sizes()
    if min(sizes) == 0:
        return PerVertexCounts.zeros(g.n)

    h = sigma.h
    smallest = sizes.index(min(sizes))
    parts = sigma.rotated(smallest).parts
    members = [part.members for part in parts]
    adj = matmul.CountMatrix.from_adjacency(g.adj)

    def block(x, y):
        return adj.submatrix(members[x], members[y])

    pieces = []
    try:
        forward = [matmul.CountMatrix.identity(len(parts[0]))]
        for i in range(1, h):
            forward.append(matmul.multiply(
                forward[-1], block(i - 1, i), wc, entry_bits))
        pieces.append((members[0], matmul.diagonal_product(
            forward[h - 1], block(h - 1, 0), wc, entry_bits)))

        backward = [matmul.CountMatrix.identity(len(parts[0]))]
        for i in range(1, h):
            step = block(h - i, (h - i + 1) % h).transpose()
            backward.append(matmul.multiply(backward[-1], step, wc,
                                            entry_bits))
        for j in range(1, h):
            pieces.append((members[j], matmul.diagonal_product(
                forward[j].transpose(), backward[h - j], wc, entry_bits)))
    except utils.CountOverflowError as error:
        raise utils.CountOverflowError(
            "Path counts overflow for n={}, h={}: {}".format(g.n, h, error))

    big = any(values.dtype == object for _, values in pieces)
    counts = np.zeros(g.n, dtype=object if big else np.int64)
    for part_members, values in pieces:
        counts[part_members] = values
    return PerVertexCounts(counts)


def _check_colorful_args(g, coloring, s, k):
    h = coloring.num_classes
    if coloring.n != g.n:
        raise utils.InputError("Coloring does not match the graph size.")
    if h < 3:
        raise utils.InputError("Colorful counting needs h >= 3 classes.")
    if not 1 <= k <= h:
        raise utils.InputError("k must lie in 1..{}, got {}.".format(h, k))
    s.check_within(g.n)


def count_colorful_k(g, coloring, s, k, wc=None,
                     entry_bits=matmul.DEFAULT_ENTRY_BITS):
    """Count colorful h-cycles meeting S exactly k times, per vertex.

    The cycle length h is the number of color classes. A cycle is colorful
    when its h vertices carry h distinct colors. For every choice x of k
    color classes the classes in x are restricted to S and the others to
    V - S; every ordering of the classes is then counted with count_t_sigma.

    Only orderings starting with class 1 are evaluated. The other orderings
    are rotations of these, so a colorful cycle is seen automorphism_constant
    / h times: once in directed graphs and once per direction in undirected
    ones.

    Args:
        g (Graph): input graph.
        coloring (Coloring): coloring with h classes.
        s (VertexSet): the distinguished set S.
        k (int): required intersection size, 1 <= k <= h.
        wc (WorkCounter): optional work counter.
        entry_bits (int): count width limit.

    Returns:
        PerVertexCounts

    Raises:
        InvariantError: if an undirected sum does not count every cycle
            in both directions.
    """
    _check_colorful_args(g, coloring, s, k)
    h = coloring.num_classes
    color = coloring.color
    colorful = g.adj & (color[:, None] != color[None, :])
    g = graph.Graph(colorful, g.mode)

    in_s = s.mask(g.n)
    classes = [color == i for i in range(1, h + 1)]
    total = PerVertexCounts.zeros(g.n)
    for chosen in itertools.combinations(range(h), k):
        chosen = set(chosen)
        parts = [
            graph.VertexSet.from_mask(
                classes[i] & (in_s if i in chosen else ~in_s))
            for i in range(h)]
        if not all(len(part) for part in parts):
            continue
        for rest in itertools.permutations(range(1, h)):
            order = (0,) + rest
            sigma = OrderedPartition([parts[i] for i in order])
            total = total + count_t_sigma(g, sigma, wc, entry_bits)

    return total.exact_div(automorphism_constant(h, g.directed) // h)


def count_colorful_total(g, coloring, s, k, wc=None,
                         entry_bits=matmul.DEFAULT_ENTRY_BITS):
    """Count colorful h-cycles meeting S exactly k times.

    Every such cycle contributes to k vertices of S, so the total is the sum
    of per-vertex counts over S divided by k.
    """
    counts = count_colorful_k(g, coloring, s, k, wc, entry_bits)
    in_s = sum(counts[v] for v in s)
    if in_s % k:
        raise utils.InvariantError(
            "Colorful count {} over S is not divisible by k={}.".format(
                in_s, k))
    return in_s // k


def colorful_vertices(g, coloring, wc=None,
                      entry_bits=matmul.DEFAULT_ENTRY_BITS):
    """Get every vertex lying on at least one colorful h-cycle."""
    everything = graph.VertexSet.all(g.n)
    counts = count_colorful_k(g, coloring, everything, coloring.num_classes,
                              wc, entry_bits)
    return counts.support()


def cycle_count_upper_bound(g, h):
    """Get an upper bound on the number of h-cycles through any vertex.

    A vertex starts at most D**(h-1) directed walks of length h-1, with D
    the maximum out-degree, and no vertex lies on more than n**h cycles.
    """
    if g.n == 0:
        return 0
    max_degree = int(g.degrees().max())
    return min(g.n ** h, max_degree ** (h - 1))
