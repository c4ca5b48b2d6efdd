"""Diversity-aware graph ranking with negative reinforcement (NR2) and baselines."""

from .errors import ParameterError, ParseError, SolverError, ValidationError
from .graph import (
    Graph,
    PlantedPartitionSpec,
    TransitionMatrix,
    augment_absorbing,
    from_edges,
    generate_planted_partition,
    induced_subgraph,
    load_edge_list,
    row_normalize,
)
from .metrics import attribute_coverage, density, rouge1_recall
from .rankers import (
    ALGORITHMS,
    RankingResult,
    RankParams,
    divrank_rank,
    grasshopper_rank,
    mmr_rank,
    nr2_rank,
    pagerank,
    personalized_pagerank,
    rank,
)
from .solver import factorize, power_iteration, solve
from .text import summarize_cluster

__version__ = "0.1.0"
