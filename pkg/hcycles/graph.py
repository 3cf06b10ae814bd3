"""Dense graphs, colorings and vertex sets.

Every algorithm in the package works on dense adjacency matrices, so a graph
is an immutable n x n boolean numpy array plus a mode flag. Induced subgraphs
carry labels pointing back to the vertex ids of the graph they were cut from,
so that recursive callers can report vertices of the root graph.
"""
import logging

import numpy as np

from hcycles import utils

logger = logging.getLogger(__name__)

DIRECTED = "directed"
UNDIRECTED = "undirected"
MODES = (DIRECTED, UNDIRECTED)


def _frozen(array):
    array.flags.writeable = False
    return array


class VertexSet(object):
    """Sorted set of distinct vertex ids."""

    def __init__(self, members=()):
        array = np.unique(np.asarray(list(members), dtype=np.int64))
        if array.size and array[0] < 0:
            raise utils.InputError("Vertex ids must be non-negative.")
        self._members = _frozen(array)

    @classmethod
    def all(cls, n):
        """Get the set {0, ..., n-1}."""
        return cls(range(n))

    @classmethod
    def from_mask(cls, mask):
        """Get the set of positions where ``mask`` is true."""
        return cls(np.flatnonzero(np.asarray(mask, dtype=bool)))

    @property
    def members(self):
        """numpy.ndarray: sorted member ids."""
        return self._members

    def check_within(self, n):
        """Raise InputError unless every member is a vertex of an n graph."""
        if self._members.size and self._members[-1] >= n:
            raise utils.InputError(
                "Vertex id {} out of range for a graph with {} vertices."
                .format(int(self._members[-1]), n))

    def mask(self, n):
        """Get a boolean membership mask of length n."""
        self.check_within(n)
        result = np.zeros(n, dtype=bool)
        result[self._members] = True
        return result

    def __len__(self):
        return int(self._members.size)

    def __iter__(self):
        return (int(v) for v in self._members)

    def __contains__(self, vertex):
        index = np.searchsorted(self._members, vertex)
        return (index < self._members.size and
                int(self._members[index]) == vertex)

    def __eq__(self, other):
        if not isinstance(other, VertexSet):
            return NotImplemented
        return np.array_equal(self._members, other.members)

    def __hash__(self):
        return hash(tuple(self))

    def __repr__(self):
        return "VertexSet({})".format(list(self))


class Graph(object):
    """Immutable dense graph.

    Attributes:
        adj (numpy.ndarray): n x n boolean adjacency, row u column v means
            an edge u -> v. Symmetric in undirected mode.
        mode (str): ``directed`` or ``undirected``.
        labels (numpy.ndarray or None): original vertex ids for graphs that
            were cut out of a bigger graph.
    """

    def __init__(self, adj, mode=UNDIRECTED, labels=None):
        if mode not in MODES:
            raise utils.InputError("Unknown graph mode: {}".format(mode))
        adj = np.array(adj, dtype=bool, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise utils.InputError("Adjacency matrix must be square.")
        if adj.diagonal().any():
            raise utils.InputError("Self-loops are not allowed.")
        if mode == UNDIRECTED and not np.array_equal(adj, adj.T):
            raise utils.InputError("Undirected adjacency must be symmetric.")
        if labels is not None:
            labels = np.array(labels, dtype=np.int64, copy=True)
            if labels.shape != (adj.shape[0],):
                raise utils.InputError("Need exactly one label per vertex.")
            if labels.size and (labels.min() < 0 or
                                np.unique(labels).size != labels.size):
                raise utils.InputError(
                    "Labels must be distinct non-negative ids.")
            labels = _frozen(labels)
        self.adj = _frozen(adj)
        self.mode = mode
        self.labels = labels

    @classmethod
    def empty(cls, n, mode=UNDIRECTED):
        """Get an edgeless graph on n vertices."""
        return cls(np.zeros((n, n), dtype=bool), mode)

    @classmethod
    def from_edges(cls, n, edges, mode=UNDIRECTED):
        """Build a graph from (u, v) pairs.

        In undirected mode every pair is stored in both orientations.
        """
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise utils.InputError(
                    "Edge ({}, {}) out of range for {} vertices."
                    .format(u, v, n))
            if u == v:
                raise utils.InputError("Self-loop on vertex {}.".format(u))
            adj[u, v] = True
            if mode == UNDIRECTED:
                adj[v, u] = True
        return cls(adj, mode)

    @property
    def n(self):
        """int: number of vertices."""
        return int(self.adj.shape[0])

    @property
    def directed(self):
        """bool: true for directed graphs."""
        return self.mode == DIRECTED

    @property
    def num_edges(self):
        """int: number of edges, undirected edges counted once."""
        total = int(self.adj.sum())
        return total if self.directed else total // 2

    def edges(self):
        """Get all edges as a list of (u, v) pairs.

        Undirected edges are listed once with u < v.
        """
        adj = self.adj if self.directed else np.triu(self.adj)
        rows, cols = np.nonzero(adj)
        return [(int(u), int(v)) for u, v in zip(rows, cols)]

    def degrees(self):
        """Get out-degrees (plain degrees in undirected mode)."""
        return self.adj.sum(axis=1).astype(np.int64)

    def root_labels(self):
        """Get the label array, or the identity labelling."""
        if self.labels is None:
            return np.arange(self.n, dtype=np.int64)
        return self.labels

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.mode == other.mode and
                np.array_equal(self.adj, other.adj) and
                np.array_equal(self.root_labels(), other.root_labels()))

    def __hash__(self):
        return hash((self.mode, self.adj.tobytes()))

    def __repr__(self):
        return "Graph(n={}, mode={}, edges={})".format(
            self.n, self.mode, self.num_edges)


class Coloring(object):
    """Vertex coloring with colors 1..num_classes."""

    def __init__(self, color, num_classes):
        color = np.array(color, dtype=np.int64, copy=True)
        if num_classes < 1:
            raise utils.InputError("A coloring needs at least one class.")
        if color.ndim != 1:
            raise utils.InputError("Colors must be a flat sequence.")
        if color.size and (color.min() < 1 or color.max() > num_classes):
            raise utils.InputError(
                "Colors must lie in 1..{}.".format(num_classes))
        self.color = _frozen(color)
        self.num_classes = int(num_classes)

    @property
    def n(self):
        """int: number of colored vertices."""
        return int(self.color.size)

    def class_members(self, i):
        """Get the vertices of color class i as a VertexSet."""
        return VertexSet.from_mask(self.color == i)

    def class_sizes(self):
        """Get the size of every color class, in class order."""
        return [int(np.count_nonzero(self.color == i))
                for i in range(1, self.num_classes + 1)]

    def restrict(self, keep):
        """Get the coloring of an induced subgraph on ``keep``."""
        keep.check_within(self.n)
        return Coloring(self.color[keep.members], self.num_classes)

    def __eq__(self, other):
        if not isinstance(other, Coloring):
            return NotImplemented
        return (self.num_classes == other.num_classes and
                np.array_equal(self.color, other.color))

    def __hash__(self):
        return hash((self.num_classes, self.color.tobytes()))

    def __repr__(self):
        return "Coloring(n={}, classes={})".format(self.n, self.num_classes)


def induced_subgraph(g, keep):
    """Get the subgraph of g induced by ``keep``.

    Labels of the result point to the ids of g's own root graph, so that
    nested calls compose: G[A][B] has the same labels as G[B].

    Args:
        g (Graph): host graph.
        keep (VertexSet): vertices to keep, in g's id space.

    Returns:
        Graph: induced subgraph with labels.
    """
    keep.check_within(g.n)
    index = keep.members
    adj = g.adj[np.ix_(index, index)]
    return Graph(adj, g.mode, labels=g.root_labels()[index])


def bernoulli_sample(g, p, rng_seed):
    """Keep every vertex independently with probability p.

    This is the random induced subgraph G[p].
    """
    if not 0.0 <= p <= 1.0:
        raise utils.InputError("Keep probability must lie in [0, 1].")
    rng = utils.make_rng(rng_seed)
    kept = rng.random(g.n) < p
    return induced_subgraph(g, VertexSet.from_mask(kept))


def random_coloring(n, num_classes, rng_seed):
    """Color n vertices independently and uniformly with 1..num_classes."""
    if num_classes < 1:
        raise utils.InputError("A coloring needs at least one class.")
    rng = utils.make_rng(rng_seed)
    return Coloring(rng.integers(1, num_classes + 1, size=n), num_classes)


def layered_graph(g, coloring):
    """Keep only edges from class i to class i+1 (mod h), directed.

    An edge u -> v survives iff (u, v) is an edge of g, in either orientation
    for undirected graphs, and color(v) follows color(u) cyclically.

    Args:
        g (Graph): input graph.
        coloring (Coloring): coloring of g with h >= 3 classes.

    Returns:
        Graph: directed h-partite graph G_phi, labels copied from g.
    """
    if coloring.n != g.n:
        raise utils.InputError("Coloring does not match the graph size.")
    if coloring.num_classes < 3:
        raise utils.InputError("Layering needs at least 3 color classes.")
    color = coloring.color
    follows = (color[:, None] % coloring.num_classes + 1) == color[None, :]
    either = g.adj if g.directed else (g.adj | g.adj.T)
    return Graph(either & follows, DIRECTED, labels=g.labels)


def format_graph(g):
    """Serialize a graph to the text interchange format.

    The first line is ``n mode``, followed by one ``u v`` pair per edge.
    Undirected edges are written once.
    """
    lines = ["{} {}".format(g.n, g.mode)]
    lines.extend("{} {}".format(u, v) for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_graph(text):
    """Parse the text interchange format.

    Blank lines and lines starting with ``#`` are ignored.

    Raises:
        InputError: on a malformed header or edge line.
    """
    rows = []
    for line_no, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append((line_no, line.split()))
    if not rows:
        raise utils.InputError("Graph file is empty.")

    line_no, header = rows[0]
    if len(header) != 2 or not header[0].isdigit() or header[1] not in MODES:
        raise utils.InputError(
            "Line {}: expected header 'n directed|undirected'.".format(
                line_no))
    n, mode = int(header[0]), header[1]

    edges = []
    for line_no, fields in rows[1:]:
        try:
            u, v = (int(f) for f in fields)
        except ValueError:
            raise utils.InputError(
                "Line {}: expected an edge 'u v'.".format(line_no))
        edges.append((u, v))
    return Graph.from_edges(n, edges, mode)


def read_graph(path):
    """Read a graph file."""
    logger.debug("Reading graph from %s", path)
    with open(path) as graph_file:
        return parse_graph(graph_file.read())


def write_graph(g, path):
    """Write a graph file."""
    logger.debug("Writing %r to %s", g, path)
    with open(path, "w") as graph_file:
        graph_file.write(format_graph(g))


def read_vertex_set(path, n=None):
    """Read whitespace separated vertex ids.

    Args:
        path (str): file with vertex ids; ``#`` starts a comment.
        n (int): optional graph size to range check against.

    Returns:
        VertexSet
    """
    with open(path) as set_file:
        tokens = []
        for line in set_file:
            tokens.extend(line.split("#", 1)[0].split())
    try:
        members = VertexSet(int(token) for token in tokens)
    except ValueError:
        raise utils.InputError("Malformed vertex set file: {}".format(path))
    if n is not None:
        members.check_within(n)
    return members
