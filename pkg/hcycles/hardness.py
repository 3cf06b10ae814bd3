"""Gap gadgets and planted instances.

The gadgets turn a tripartite graph into one whose cycle count is the
triangle count times a known factor, so a graph has no cycles exactly when
the tripartite graph has no triangles. The planted instances build graphs
with known cycle counts and designated heavy vertices; every instance is
checked against brute force before it is returned.
"""
import json
import logging

import numpy as np

from hcycles import exact
from hcycles import graph
from hcycles import utils

logger = logging.getLogger(__name__)

PRESETS = ("disjoint", "random", "hub", "gadget", "witness")


class TripartiteSpec(object):
    """Tripartite graph on A, B and C.

    Vertices are numbered A first, then B, then C. Edges are given as local
    index pairs per part pair.

    Args:
        sizes (tuple): (|A|, |B|, |C|).
        ab (iterable): pairs (a, b).
        bc (iterable): pairs (b, c).
        ca (iterable): pairs (c, a).
    """

    def __init__(self, sizes, ab=(), bc=(), ca=()):
        if len(sizes) != 3 or any(size < 0 for size in sizes):
            raise utils.InputError("Need three non-negative part sizes.")
        self.sizes = tuple(int(size) for size in sizes)
        size_a, size_b, size_c = self.sizes
        self.ab = self._checked(ab, size_a, size_b, "AB")
        self.bc = self._checked(bc, size_b, size_c, "BC")
        self.ca = self._checked(ca, size_c, size_a, "CA")

    @staticmethod
    def _checked(pairs, first, second, name):
        pairs = sorted(set((int(x), int(y)) for x, y in pairs))
        for x, y in pairs:
            if not (0 <= x < first and 0 <= y < second):
                raise utils.InputError(
                    "{} edge ({}, {}) is out of range.".format(name, x, y))
        return pairs

    @classmethod
    def random(cls, sizes, density, rng_seed):
        """Get a random tripartite graph with the given edge density."""
        if not 0 <= density <= 1:
            raise utils.InputError("Density must lie in [0, 1].")
        rng = utils.make_rng(rng_seed)
        size_a, size_b, size_c = sizes

        def pairs(first, second):
            mask = rng.random((first, second)) < density
            return list(zip(*np.nonzero(mask)))

        return cls(sizes, pairs(size_a, size_b), pairs(size_b, size_c),
                   pairs(size_c, size_a))

    def _matrix(self, pairs, first, second):
        matrix = np.zeros((first, second), dtype=np.int64)
        for x, y in pairs:
            matrix[x, y] = 1
        return matrix

    def triangle_count(self):
        """Count triangles (a, b, c) directly."""
        size_a, size_b, size_c = self.sizes
        paths = np.dot(self._matrix(self.ab, size_a, size_b),
                       self._matrix(self.bc, size_b, size_c))
        closing = self._matrix(self.ca, size_c, size_a).T
        return int((paths * closing).sum())

    def to_graph(self):
        """Get the undirected graph on A, B, C."""
        size_a, size_b, _ = self.sizes
        offset_b, offset_c = size_a, size_a + size_b
        edges = [(a, offset_b + b) for a, b in self.ab]
        edges += [(offset_b + b, offset_c + c) for b, c in self.bc]
        edges += [(offset_c + c, a) for c, a in self.ca]
        return graph.Graph.from_edges(sum(self.sizes), edges)

    def __repr__(self):
        return "TripartiteSpec(sizes={}, edges={})".format(
            self.sizes, len(self.ab) + len(self.bc) + len(self.ca))


def triangle_gap_blowup(spec, t):
    """Replace every B vertex by t copies.

    The result has exactly t triangles per triangle of spec. B copies are
    numbered b*t + i after A, and C follows them.
    """
    if t < 1:
        raise utils.InputError("Blow-up factor must be at least 1.")
    size_a, size_b, size_c = spec.sizes
    offset_b, offset_c = size_a, size_a + size_b * t
    edges = [(offset_c + c, a) for c, a in spec.ca]
    for i in range(t):
        edges += [(a, offset_b + b * t + i) for a, b in spec.ab]
        edges += [(offset_b + b * t + i, offset_c + c) for b, c in spec.bc]
    return graph.Graph.from_edges(offset_c + size_c, edges)


def layer_width(h, t):
    """Get the smallest l with l**(h-2) >= t, and l**(h-2).

    Args:
        h (int): cycle length, at least 3.
        t (int): requested multiplier, at least 1.

    Returns:
        tuple: (l, realized multiplier l**(h-2)).
    """
    if h < 3 or t < 1:
        raise utils.InputError("Need h >= 3 and t >= 1.")
    power = h - 2
    width = max(1, int(round(t ** (1.0 / power))))
    while width ** power < t:
        width += 1
    while width > 1 and (width - 1) ** power >= t:
        width -= 1
    return width, width ** power


def hcycle_gap_layering(spec, h, t, mode=graph.DIRECTED):
    """Turn every triangle of spec into l**(h-2) h-cycles.

    Each B vertex gets l copies in each of h-2 layers. Edges run C -> A,
    A -> first layer, layer j -> layer j+1 between copies of the same b,
    and last layer -> C.

    Raises:
        InputError: for undirected output with even h. Removing one part
            of the layered graph leaves a bipartite graph, which only
            rules out shortcut cycles when h is odd.
    """
    if h < 3:
        raise utils.InputError("Cycle length must be at least 3.")
    if mode == graph.UNDIRECTED and h % 2 == 0:
        raise utils.InputError(
            "Undirected layering only preserves the gap for odd h.")
    width, _ = layer_width(h, t)
    size_a, size_b, size_c = spec.sizes
    layers = h - 2
    offset_c = size_a + size_b * width * layers

    def copy(b, i, j):
        return size_a + ((j - 1) * size_b + b) * width + i

    edges = [(offset_c + c, a) for c, a in spec.ca]
    for i in range(width):
        edges += [(a, copy(b, i, 1)) for a, b in spec.ab]
        edges += [(copy(b, i, layers), offset_c + c) for b, c in spec.bc]
    for j in range(1, layers):
        for b in range(size_b):
            for i in range(width):
                for i_next in range(width):
                    edges.append((copy(b, i, j), copy(b, i_next, j + 1)))
    return graph.Graph.from_edges(offset_c + size_c, edges, mode)


class GroundTruth(object):
    """Verified counts of a planted instance."""

    def __init__(self, preset, params, total, per_vertex, heavy=(),
                 light=(), s_set=None):
        self.preset = preset
        self.params = params
        self.total = total
        self.per_vertex = per_vertex
        self.heavy = sorted(heavy)
        self.light = sorted(light)
        self.s_set = sorted(s_set) if s_set is not None else None

    def as_dict(self):
        """Get the sidecar contents."""
        return {
            "preset": self.preset,
            "params": self.params,
            "total": self.total,
            "per_vertex": list(self.per_vertex),
            "heavy": self.heavy,
            "light": self.light,
            "s_set": self.s_set,
        }

    def to_json(self):
        """Serialize the sidecar with sorted keys."""
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)


def _cycle_edges(vertices):
    return [(vertices[i], vertices[(i + 1) % len(vertices)])
            for i in range(len(vertices))]


def _plant_disjoint(n, h, t_target, rng, mode, noise=0.0):
    if t_target * h > n:
        raise utils.InputError(
            "{} disjoint {}-cycles do not fit in {} vertices.".format(
                t_target, h, n))
    order = [int(v) for v in rng.permutation(n)]
    edges = []
    for c in range(t_target):
        edges += _cycle_edges(order[c * h:(c + 1) * h])
    if noise:
        mask = rng.random((n, n)) < noise
        if mode == graph.UNDIRECTED:
            mask = np.triu(mask, 1)
        np.fill_diagonal(mask, False)
        edges += [(int(u), int(v)) for u, v in zip(*np.nonzero(mask))]
    return edges, {}


def _plant_hub(n, h, t_target, rng, mode):
    needed = 1 + t_target * (h - 1)
    if needed > n:
        raise utils.InputError(
            "A hub on {} private {}-cycles needs {} vertices, have {}."
            .format(t_target, h, needed, n))
    if not t_target:
        return [], {}
    order = [int(v) for v in rng.permutation(n)]
    hub = order[0]
    edges = []
    for c in range(t_target):
        start = 1 + c * (h - 1)
        edges += _cycle_edges([hub] + order[start:start + h - 1])
    return edges, {"heavy": [hub]}


def _plant_gadget(n, h, t_target, rng, mode):
    if mode == graph.UNDIRECTED and h % 2 == 0:
        raise utils.InputError("The undirected gadget needs odd h.")
    if not t_target:
        return [], {"core_size": 0, "t_v": 0}
    core, realized = layer_width(h, t_target)
    needed = 2 + core * (h - 2)
    if needed > n:
        raise utils.InputError(
            "Gadget with core size {} needs {} vertices, have {}.".format(
                core, needed, n))
    order = [int(v) for v in rng.permutation(n)]
    v, u = order[0], order[1]
    cores = [order[2 + c * core:2 + (c + 1) * core] for c in range(h - 2)]
    edges = [(v, u)]
    edges += [(u, w) for w in cores[0]]
    edges += [(w, v) for w in cores[-1]]
    for c in range(h - 3):
        later = cores[c + 1:] if mode == graph.DIRECTED else [cores[c + 1]]
        for target in later:
            edges += [(x, y) for x in cores[c] for y in target]
    return edges, {"heavy": [v, u], "core_size": core, "t_v": realized}


def _plant_witness(n, h, t_target, rng, mode, shared=True):
    if h != 3:
        raise utils.InputError("The witness preset is defined for h = 3.")
    if n < 9:
        raise utils.InputError("The witness preset needs 9 vertices.")
    order = [int(v) for v in rng.permutation(n)]
    if shared:
        edges = _cycle_edges(order[:3])
        s_set = order[:3]
    else:
        edges = []
        for c in range(3):
            edges += _cycle_edges(order[3 * c:3 * c + 3])
        s_set = [order[0], order[3], order[6]]
    return edges, {"s_set": s_set, "shared": shared}


def plant_instance(n, h, t_target, preset, rng_seed, mode=graph.UNDIRECTED,
                   budget=exact.DEFAULT_ENUMERATION_BUDGET, **options):
    """Build a graph with known h-cycle counts.

    Presets:
        disjoint: t_target vertex disjoint cycles.
        random: disjoint cycles plus random noise edges with density
            options["noise"]; the count may exceed t_target.
        hub: one vertex on t_target cycles whose other vertices are private.
        gadget: pendant v and u in front of h-2 cores of size k with
            k**(h-2) >= t_target; v lies on exactly k**(h-2) cycles.
        A t_target of 0 gives an edgeless graph for every preset but
        witness.
        witness: h = 3; S meets one shared triangle three times
            (options["shared"] true) or three disjoint triangles once.

    Returns:
        tuple: (Graph, GroundTruth)

    Raises:
        InputError: for infeasible or unknown presets.
        InvariantError: when brute force disagrees with the construction.
    """
    if preset not in PRESETS:
        raise utils.InputError("Unknown preset {!r}, use one of {}".format(
            preset, ", ".join(PRESETS)))
    if h < 3 or n < 0 or t_target < 0:
        raise utils.InputError("Need h >= 3, n >= 0 and t_target >= 0.")
    rng = utils.make_rng(rng_seed)
    if preset == "disjoint":
        edges, extra = _plant_disjoint(n, h, t_target, rng, mode)
    elif preset == "random":
        edges, extra = _plant_disjoint(n, h, t_target, rng, mode,
                                       options.get("noise", 0.05))
    elif preset == "hub":
        edges, extra = _plant_hub(n, h, t_target, rng, mode)
    elif preset == "gadget":
        edges, extra = _plant_gadget(n, h, t_target, rng, mode)
    else:
        edges, extra = _plant_witness(n, h, t_target, rng, mode,
                                      options.get("shared", True))

    adj = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        adj[u, v] = True
        if mode == graph.UNDIRECTED:
            adj[v, u] = True
    g = graph.Graph(adj, mode)
    total, per_vertex = exact.brute_force_cycles(g, h, budget)

    if preset == "disjoint" and total != t_target:
        raise utils.InvariantError(
            "Planted {} cycles but found {}.".format(t_target, total))
    if preset in ("hub", "gadget") and not t_target and total:
        raise utils.InvariantError(
            "Planted no cycles but found {}.".format(total))
    if preset == "hub" and t_target and (
            per_vertex[extra["heavy"][0]] != t_target):
        raise utils.InvariantError("Hub lies on the wrong number of cycles.")
    if preset == "gadget" and t_target and (
            per_vertex[extra["heavy"][0]] != extra["t_v"]):
        raise utils.InvariantError(
            "Gadget vertex lies on {} cycles instead of {}.".format(
                per_vertex[extra["heavy"][0]], extra["t_v"]))

    heavy = extra.get("heavy", [])
    light = [v for v, c in enumerate(per_vertex) if c and v not in heavy]
    params = {"n": n, "h": h, "t_target": t_target, "mode": mode}
    params.update((key, value) for key, value in extra.items()
                  if key not in ("heavy", "s_set"))
    truth = GroundTruth(preset, params, total, list(per_vertex), heavy,
                        light, extra.get("s_set"))
    logger.info("Planted %s instance: n=%d h=%d total=%d", preset, n, h,
                total)
    return g, truth
