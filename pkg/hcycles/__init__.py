"""Main hcycles package.

This package exposes approximate and exact h-cycle counters, the graph types
they work on and the generators used to test them.
"""
from hcycles.count_heavy import EstimatorConfig
from hcycles.count_heavy import HeavyBand
from hcycles.exact import OrderedPartition
from hcycles.exact import PerVertexCounts
from hcycles.find_heavy import SampleVector
from hcycles.graph import Coloring
from hcycles.graph import Graph
from hcycles.graph import VertexSet
from hcycles.hardness import TripartiteSpec
from hcycles.matmul import CountMatrix
from hcycles.matmul import WorkCounter
from hcycles.template import CountReport
from hcycles.template import TemplateCounter
from hcycles.template import doubling


__all__ = [
    Coloring.__name__,
    CountMatrix.__name__,
    CountReport.__name__,
    EstimatorConfig.__name__,
    Graph.__name__,
    HeavyBand.__name__,
    OrderedPartition.__name__,
    PerVertexCounts.__name__,
    SampleVector.__name__,
    TemplateCounter.__name__,
    TripartiteSpec.__name__,
    VertexSet.__name__,
    WorkCounter.__name__,
    doubling.__name__,
]
