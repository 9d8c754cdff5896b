"""Feature learning on feature-sample networks with evolved and-features."""

from .andfeature import (
    AndFeature,
    ConnectionCache,
    connected_samples,
    count_possible_and_features,
    enumerate_connected_oracle,
    order_probability,
    read_afs,
    sample_and_feature,
    write_afs,
)
from .analysis import AccuracyTable, InteractionMatrix, enhanced_matrix, knn_predict, split_validate, stratified_split
from .errors import (
    AndFeaturesError,
    BoundsError,
    ConfigError,
    DataError,
    DomainError,
    OracleInfeasible,
    ParseError,
)
from .lga import LgaConfig, run_lga
from .network import (
    BinaryDataset,
    FeatureSampleNetwork,
    RawDataset,
    binarize,
    build_network,
    export_graph_description,
    ingest_csv,
    read_fsn,
    write_fsn,
)
from .objectives import (
    CandidateSolution,
    EvaluationResult,
    ObjectiveVector,
    Ordering,
    disproportion,
    dominates,
    evaluate,
    lex_better,
)
from .operators import (
    InitParams,
    VariationParams,
    binary_tournament,
    breed,
    init_individual,
    modify_and_feature,
    mutate,
    uniform_crossover,
)
from .report import FinalSolution, RunReport
from .spea2 import Spea2Config, environmental_selection, run_spea2, spea2_fitness, truncate

__version__ = "0.1.0"
