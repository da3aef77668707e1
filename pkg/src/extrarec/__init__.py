"""Diffusion-based top-K recommendation on user-item bipartite graphs.

Mass diffusion (MD), heat conduction (HC), their hybrid (HHP), biased heat
conduction (BHC) and expertise-weighted mass diffusion (ExTrA), together
with the accuracy/diversity evaluation harness used to compare them.
"""

from .dataset import (InteractionLog, ParseError, SplitDataset, load_interactions,
                      parse_edge_list, parse_movielens, read_split, split, write_split)
from .estimator import DiffusionRecommender
from .expertise import ExpertiseVector, compute_expertise
from .graph import BipartiteGraph, build_graph
from .kernels import KernelSpec, parse_method, top_k
from .metrics import EvalReport, evaluate

__version__ = "0.1.0"

__all__ = [
    "BipartiteGraph",
    "DiffusionRecommender",
    "EvalReport",
    "ExpertiseVector",
    "InteractionLog",
    "KernelSpec",
    "ParseError",
    "SplitDataset",
    "build_graph",
    "compute_expertise",
    "evaluate",
    "load_interactions",
    "parse_edge_list",
    "parse_method",
    "parse_movielens",
    "read_split",
    "split",
    "top_k",
    "write_split",
]
