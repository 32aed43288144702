"""Problem front-ends: flows, circulations, processing networks, trees and matroids."""
from .graphs import Commodity, Digraph, Edge, Graph, ProblemFile, parse_dimacs, read_dimacs, write_dimacs
from .paths import (
    ConcurrentOracle,
    PathOracle,
    WeightedMCFOracle,
    concurrent_oracle,
    dijkstra_path,
    dijkstra_path_oracle,
    solve_budget_maxflow,
    solve_concurrent,
    solve_weighted_mcf,
    weighted_mcf_oracle,
)
from .cycles import KarpOracle, karp_min_mean_cycle, solve_budget_mincost
from .processing import ProcessingNetwork, SchemeOracle, scheme_oracle, solve_gpn
from .trees import TreeOracle, kruskal, mst_oracle, solve_treepack, treepack_instance
from .matroids import (
    BasisOracle,
    FreeMatroid,
    GraphicMatroid,
    IndependenceMatroid,
    Matroid,
    PartitionMatroid,
    UniformMatroid,
    matroid_greedy,
    matroid_greedy_oracle,
    basepack_instance,
    solve_basepack,
)
