"""Anytime subgroup discovery with Monte Carlo tree search."""

from .baselines import BeamConfig, LatticeTooLargeError, beam_search, exhaustive_dfs, uniform_sampler
from .dataset import (
    AttributeMeta,
    Dataset,
    DuplicateColumnError,
    EmptyDatasetError,
    LoadError,
    MissingColumnError,
    ValueParseError,
    load_csv,
    load_schema,
)
from .generator import GeneratorParams, GroundTruth, generate_artificial
from .measures import MeasureSpec, evaluate, evaluate_mask, normalize
from .mcts import MctsResult, SearchConfig, TreeNode, iter_nodes, mcts_search, ucb_score
from .patterns import (
    Description,
    IntervalRestriction,
    Subgroup,
    ValueRestriction,
    canonical_key,
    direct_refinements,
    extent,
    format_description,
    gen_refinements,
    is_more_specific,
    label_refinements,
    lectic_children,
    parse_description,
    rho_norm,
)
from .results import (
    PatternPool,
    PoolEntry,
    ResultSet,
    diversity,
    filter_pool,
    jaccard_sim,
    recovery_qual,
    redundancy,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
