"""Over-representation analysis of predictor-derived gene lists."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

from ..dataset import PREDICTORS
from ..errors import EmptyQuery, InconsistentBackground, InputError, UnmappedPredictor
from .hypergeom import bh_adjust, hypergeom_upper_tail
from .kegg import parse_kegg_link, parse_kegg_list_counted

LOG = logging.getLogger(__name__)

DEFAULT_BACKGROUND = 20000
NO_INTERVENTION = "no-known-intervention"


@dataclass(frozen=True)
class Pathway:
    pathway_id: str
    name: str
    genes: frozenset

    @property
    def size(self):
        return len(self.genes)


@dataclass(frozen=True)
class PathwayDb:
    pathways: dict
    background_size: int

    def __post_init__(self):
        for p in self.pathways.values():
            if not p.genes:
                raise InputError(f"pathway {p.pathway_id} has no member genes")
            if p.size > self.background_size:
                raise InconsistentBackground(
                    f"pathway {p.pathway_id} has {p.size} genes, more than the background "
                    f"size {self.background_size}"
                )

    @classmethod
    def from_kegg(cls, link_text, list_text=None, background_size=DEFAULT_BACKGROUND):
        """Build a database from KEGG ``link`` (and optionally ``list``) text."""
        members = {}
        for gene, pid in parse_kegg_link(link_text):
            members.setdefault(pid, set()).add(gene)
        names = {}
        if list_text is not None:
            names, dups = parse_kegg_list_counted(list_text)
            if dups:
                LOG.warning("pathway list contained %d duplicate id(s)", dups)
        pathways = {
            pid: Pathway(pid, names.get(pid, pid), frozenset(genes))
            for pid, genes in sorted(members.items())
        }
        return cls(pathways, int(background_size))


@dataclass(frozen=True)
class PredictorMapping:
    entries: dict
    provenance: dict = field(default_factory=dict)
    background: int | None = None

    def __post_init__(self):
        for name, genes in self.entries.items():
            if name not in PREDICTORS:
                raise InputError(f"mapping names unknown predictor {name!r}")
            if not genes:
                raise InputError(f"predictor {name!r} maps to an empty gene list")

    @classmethod
    def from_toml(cls, text):
        doc = tomllib.loads(text)
        preds = doc.get("predictors")
        if not isinstance(preds, dict):
            raise InputError("mapping file needs a [predictors] table")
        entries = {k: tuple(str(g) for g in v) for k, v in preds.items()}
        background = doc.get("background")
        if background is not None and (not isinstance(background, int) or background < 1):
            raise InputError("background must be a positive integer")
        return cls(entries, dict(doc.get("provenance", {})), background)


def map_predictors(predictors, mapping):
    """Union of the proxy gene lists, first occurrence first."""
    seen = {}
    for name in predictors:
        if name not in mapping.entries:
            raise UnmappedPredictor(name)
        for gene in mapping.entries[name]:
            seen.setdefault(gene, None)
    return list(seen)


@dataclass(frozen=True)
class EnrichmentResult:
    pathway_id: str
    name: str
    N: int
    K: int
    n: int
    k: int
    p_raw: float
    p_adjusted: float
    overlap: tuple


def enrich(genes, db):
    """Hypergeometric over-representation test of ``genes`` against every pathway.

    Only pathways sharing at least one gene are reported. Results are sorted
    by adjusted p-value, then pathway id.
    """
    query = list(dict.fromkeys(str(g) for g in genes))
    if not query:
        raise EmptyQuery("the query gene list is empty")
    N = db.background_size
    n = len(query)
    if n > N:
        raise InconsistentBackground(f"query has {n} genes but the background has only {N}")
    qset = set(query)
    hits = []
    for pid in sorted(db.pathways):
        pw = db.pathways[pid]
        if pw.size > N:
            raise InconsistentBackground(f"pathway {pid} is larger than the background")
        overlap = tuple(sorted(qset & pw.genes))
        if overlap:
            hits.append((pw, overlap, hypergeom_upper_tail(N, pw.size, n, len(overlap))))
    adjusted = bh_adjust([h[2] for h in hits])
    results = [
        EnrichmentResult(pw.pathway_id, pw.name, N, pw.size, n, len(ov), p, padj, ov)
        for (pw, ov, p), padj in zip(hits, adjusted)
    ]
    results.sort(key=lambda r: (r.p_adjusted, r.pathway_id))
    return results


@dataclass(frozen=True)
class Intervention:
    pathway: str
    intervention: str
    drug_class: str
    exemplar: str


@dataclass(frozen=True)
class TargetKnowledge:
    interventions: tuple

    @classmethod
    def from_toml(cls, text):
        doc = tomllib.loads(text)
        rows = doc.get("targets", [])
        out = []
        for i, row in enumerate(rows):
            missing = {"pathway", "intervention", "class", "exemplar"} - set(row)
            if missing:
                raise InputError(f"targets entry {i} lacks {sorted(missing)}")
            out.append(Intervention(row["pathway"], row["intervention"], row["class"], row["exemplar"]))
        return cls(tuple(out))

    def for_pathway(self, pathway_id):
        return [iv for iv in self.interventions if iv.pathway == pathway_id]

    def unresolved(self, db):
        """Pathway ids referenced here but absent from ``db``."""
        return sorted({iv.pathway for iv in self.interventions} - set(db.pathways))


@dataclass(frozen=True)
class RankedTarget:
    rank: int
    intervention: str
    drug_class: str
    exemplar: str
    pathway_id: str
    pathway_name: str
    p_raw: float
    p_adjusted: float
    overlap_size: int
    pathway_size: int


def rank_targets(results, knowledge):
    """Interventions of enriched pathways in pathway order.

    Pathways with no entry in ``knowledge`` are kept, marked
    ``no-known-intervention``.
    """
    ranked = []
    for r in results:
        ivs = knowledge.for_pathway(r.pathway_id)
        if not ivs:
            ivs = [Intervention(r.pathway_id, NO_INTERVENTION, "", "")]
        for iv in ivs:
            ranked.append(
                RankedTarget(
                    len(ranked) + 1, iv.intervention, iv.drug_class, iv.exemplar,
                    r.pathway_id, r.name, r.p_raw, r.p_adjusted, r.k, r.K,
                )
            )
    return ranked


def _bundled(name):
    return resources.files("metapath.data").joinpath(name).read_text(encoding="utf-8")


def demo_mapping():
    return PredictorMapping.from_toml(_bundled("demo_mapping.toml"))


def default_targets():
    return TargetKnowledge.from_toml(_bundled("targets.toml"))


def demo_pathway_db(background_size=None):
    mapping = demo_mapping()
    n = background_size or mapping.background or DEFAULT_BACKGROUND
    return PathwayDb.from_kegg(_bundled("demo_link.tsv"), _bundled("demo_list.tsv"), n)
