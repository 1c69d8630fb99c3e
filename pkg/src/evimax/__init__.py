"""Opinion-aware evidential influence measures and seed-set maximization."""

from .belief import OMEGA, THETA, Frame, MassFunction, dempster_combine, simple_bba, vacuous
from .datagen import GeneratorParams, GroundTruth, TopologySpec, generate_network
from .evaluation import accuracy, accumulated_curves, opinion_report, seed_intersection
from .graph import (
    ActionRecord,
    IndicatorBBA,
    InfluenceGraph,
    edge_influence_bba,
    indicator_from_value,
    load_graph,
    save_graph,
)
from .maximize import SeedResult, maximize, phi, sigma
from .measures import ALL_MEASURES, MeasureKind, influence
from .opinion import (
    Message,
    OpinionDistribution,
    PolarityLexicon,
    TaggedToken,
    message_polarity,
    opinion_to_bba,
    token_polarity,
    user_opinion,
)
from .baselines import (
    CascadeConfig,
    CreditTable,
    OcState,
    cascade_spread,
    cd_assign_credits,
    cd_maximize,
    oc_maximize,
    oc_pmg,
    oc_step,
)

__version__ = "0.1.0"

__all__ = [
    "ActionRecord",
    "ALL_MEASURES",
    "CascadeConfig",
    "CreditTable",
    "Frame",
    "GeneratorParams",
    "GroundTruth",
    "IndicatorBBA",
    "InfluenceGraph",
    "MassFunction",
    "MeasureKind",
    "Message",
    "OcState",
    "OpinionDistribution",
    "OMEGA",
    "PolarityLexicon",
    "SeedResult",
    "TaggedToken",
    "THETA",
    "TopologySpec",
    "accumulated_curves",
    "accuracy",
    "cascade_spread",
    "cd_assign_credits",
    "cd_maximize",
    "dempster_combine",
    "edge_influence_bba",
    "generate_network",
    "indicator_from_value",
    "influence",
    "load_graph",
    "maximize",
    "message_polarity",
    "oc_maximize",
    "oc_pmg",
    "oc_step",
    "opinion_report",
    "opinion_to_bba",
    "phi",
    "save_graph",
    "seed_intersection",
    "sigma",
    "simple_bba",
    "token_polarity",
    "user_opinion",
    "vacuous",
]
