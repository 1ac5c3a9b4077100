"""Exact multi-issue negotiation over k-additive utility hypergraphs.

Utilities are weighted hypergraphs over binary issues.  A balanced vertex
separator splits the issue graph so that the welfare optimum can be found by
enumerating the cut set and searching each partition independently; a
simulated mediator runs the same search through value or comparison queries.
"""

from utilgraph.errors import CapExceeded, FormatError, RejectedInput
from utilgraph.hypergraph import Hyperedge, Skeleton, UtilityHypergraph, evaluate, load_uhg, merge, save_uhg
from utilgraph.mediator import Agent, negotiate_comparison, negotiate_value
from utilgraph.optimizer import brute_force, decomposed_search
from utilgraph.separator import Decomposition, cost_estimate, partition_balanced, validate
from utilgraph.topology import TopologySpec, agent_pair, generate

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "CapExceeded",
    "Decomposition",
    "FormatError",
    "Hyperedge",
    "RejectedInput",
    "Skeleton",
    "TopologySpec",
    "UtilityHypergraph",
    "agent_pair",
    "brute_force",
    "cost_estimate",
    "decomposed_search",
    "evaluate",
    "generate",
    "load_uhg",
    "merge",
    "negotiate_comparison",
    "negotiate_value",
    "partition_balanced",
    "save_uhg",
    "validate",
]
