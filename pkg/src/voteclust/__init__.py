"""Signed networks from roll-call votes, minimum-imbalance partitioning, and
community-detection baselines."""

from .agreement import (
    AgreementMatrix,
    WeightTable,
    agreement_histogram,
    agreement_matrix,
    score_pair,
)
from .analysis import SyntheticSpec, generate_synthetic_votes, nmi, planted_partition, run_experiment
from .community import (
    Dendrogram,
    edge_betweenness_communities,
    fast_greedy,
    modularity,
    run_baseline,
)
from .errors import DataError, InsufficientDocuments, VoteclustError
from .estimators import (
    EdgeBetweennessClustering,
    FastGreedyClustering,
    IteratedLocalSearchClustering,
)
from .graphs import (
    SignedGraph,
    UnsignedGraph,
    complementary_negative_graph,
    graph_from_agreement,
    negative_subgraph,
    positive_subgraph,
)
from .ils import IlsConfig, SolveTrace, greedy_construct, local_search, perturb, solve
from .partition import (
    NEW_CLUSTER,
    ImbalanceBreakdown,
    Partition,
    brute_force_optimum,
    imbalance,
    move_delta,
)
from .report import RunReport
from .votes import (
    Document,
    Member,
    Vote,
    VoteDataset,
    filter_dataset,
    load_dataset,
    parse_vote_token,
    save_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "AgreementMatrix",
    "DataError",
    "Dendrogram",
    "Document",
    "EdgeBetweennessClustering",
    "FastGreedyClustering",
    "IlsConfig",
    "ImbalanceBreakdown",
    "InsufficientDocuments",
    "IteratedLocalSearchClustering",
    "Member",
    "NEW_CLUSTER",
    "Partition",
    "RunReport",
    "SignedGraph",
    "SolveTrace",
    "SyntheticSpec",
    "UnsignedGraph",
    "Vote",
    "VoteDataset",
    "VoteclustError",
    "WeightTable",
    "agreement_histogram",
    "agreement_matrix",
    "brute_force_optimum",
    "complementary_negative_graph",
    "edge_betweenness_communities",
    "fast_greedy",
    "filter_dataset",
    "generate_synthetic_votes",
    "graph_from_agreement",
    "greedy_construct",
    "imbalance",
    "load_dataset",
    "local_search",
    "modularity",
    "move_delta",
    "negative_subgraph",
    "nmi",
    "parse_vote_token",
    "perturb",
    "planted_partition",
    "positive_subgraph",
    "run_baseline",
    "run_experiment",
    "save_dataset",
    "score_pair",
    "solve",
]
