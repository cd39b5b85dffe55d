from .core import (
    DEFAULT_BACKGROUND,
    NO_INTERVENTION,
    EnrichmentResult,
    Intervention,
    Pathway,
    PathwayDb,
    PredictorMapping,
    RankedTarget,
    TargetKnowledge,
    default_targets,
    demo_mapping,
    demo_pathway_db,
    enrich,
    map_predictors,
    rank_targets,
)
from .hypergeom import bh_adjust, hypergeom_pmf, hypergeom_upper_tail
from .kegg import KeggFetcher, parse_kegg_link, parse_kegg_list

__all__ = [
    "DEFAULT_BACKGROUND",
    "NO_INTERVENTION",
    "EnrichmentResult",
    "Intervention",
    "KeggFetcher",
    "Pathway",
    "PathwayDb",
    "PredictorMapping",
    "RankedTarget",
    "TargetKnowledge",
    "bh_adjust",
    "default_targets",
    "demo_mapping",
    "demo_pathway_db",
    "enrich",
    "hypergeom_pmf",
    "hypergeom_upper_tail",
    "map_predictors",
    "parse_kegg_link",
    "parse_kegg_list",
    "rank_targets",
]
