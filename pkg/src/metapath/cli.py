"""``metapath`` command line: each pipeline stage as a subcommand, ``report`` runs them all."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import OUTCOME, PREDICTORS, impute_zeros, read_csv, serialize_csv
from .enrichment import (
    DEFAULT_BACKGROUND,
    KeggFetcher,
    PathwayDb,
    PredictorMapping,
    TargetKnowledge,
    default_targets,
    demo_mapping,
    demo_pathway_db,
    enrich,
    map_predictors,
    rank_targets,
)
from .enrichment.kegg import DEFAULT_BASE_URL
from .errors import ComputationError, InputError, MetapathError
from .evaluation import (
    SWEEP_FIELDS,
    PipelineConfig,
    evaluate_split,
    seed_sweep,
    sweep_rows,
    train_test_split,
)
from .figures import emit_svg_confusion, emit_svg_enrichment, emit_svg_heatmap, emit_svg_scree
from .logistic import fit_irls
from .pca import fit_pca
from .stattests import correlation_matrix, outcome_t_tests

LOG = logging.getLogger("metapath")

EXIT_OK, EXIT_COMPUTE, EXIT_IO = 0, 1, 2
P_FLOOR = 2.2e-16
DEFAULT_QUERY_PREDICTORS = (
    "Pregnancies", "Glucose", "SkinThickness", "Insulin", "BMI", "DiabetesPedigreeFunction",
)


class StageError(Exception):
    def __init__(self, stage, exc):
        super().__init__(f"[{stage}] {exc}")
        self.stage = stage
        self.exc = exc


def format_p(p):
    """Display form of a p-value: "< 2.2e-16" below machine resolution."""
    if p < P_FLOOR:
        return "< 2.2e-16"
    return f"{p:.4g}"


@dataclass(frozen=True)
class RunConfig:
    input: str
    out_dir: str
    seed: int = 42
    test_fraction: float = 0.2
    n_components: int = 5
    threshold: float = 0.5
    leakage_free: bool = False
    offline: bool = False
    format: str = "json"
    mapping: str | None = None
    targets: str | None = None
    base_url: str = DEFAULT_BASE_URL
    cache_dir: str | None = None

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise InputError(f"--test-fraction must lie in (0, 1), got {self.test_fraction}")
        if not 1 <= self.n_components <= len(PREDICTORS):
            raise InputError(f"--components must be in 1..{len(PREDICTORS)}, got {self.n_components}")
        if not 0.0 < self.threshold < 1.0:
            raise InputError(f"--threshold must lie in (0, 1), got {self.threshold}")
        if self.format not in ("json", "csv"):
            raise InputError(f"--format must be json or csv, got {self.format!r}")
        if not 0 <= self.seed < 2**64:
            raise InputError("--seed must be a 64-bit unsigned integer")

    def pipeline(self):
        return PipelineConfig(self.test_fraction, self.n_components, self.threshold, self.leakage_free)


def _file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def config_digest(cfg, extra=None):
    """sha256 over every setting that can change a result (not where outputs go)."""
    doc = {
        "version": __version__,
        "input_sha256": _file_digest(cfg.input) if cfg.input and os.path.isfile(cfg.input) else None,
        "seed": cfg.seed,
        "test_fraction": cfg.test_fraction,
        "n_components": cfg.n_components,
        "threshold": cfg.threshold,
        "leakage_free": cfg.leakage_free,
        "mapping_sha256": _maybe_digest(cfg.mapping),
        "targets_sha256": _maybe_digest(cfg.targets),
    }
    if extra:
        doc.update(extra)
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _maybe_digest(path):
    if path and path != "demo" and os.path.isfile(path):
        return _file_digest(path)
    return path


class ArtifactWriter:
    """Writes artifacts atomically (temp file + rename) with seed/digest metadata."""

    def __init__(self, out_dir, cfg, digest):
        self.out_dir = Path(out_dir)
        self.cfg = cfg
        self.digest = digest
        self.written = []

    @property
    def meta(self):
        return {"seed": self.cfg.seed, "config_digest": self.digest, "metapath_version": __version__}

    def _write(self, name, text):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        target = self.out_dir / name
        fd, tmp = tempfile.mkstemp(dir=self.out_dir, prefix=f".{name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.written.append(name)
        return target

    def json_doc(self, name, payload):
        doc = {"meta": self.meta}
        doc.update(payload)
        return self._write(name, json.dumps(_plain(doc), indent=2) + "\n")

    def table(self, stem, rows, fields, extra_json=None):
        """Write ``rows`` as ``stem.json`` or ``stem.csv`` depending on ``--format``."""
        if self.cfg.format == "json":
            payload = {"rows": rows}
            if extra_json:
                payload.update(extra_json)
            return self.json_doc(f"{stem}.json", payload)
        buf = io.StringIO()
        buf.write(f"# seed={self.cfg.seed} config_digest={self.digest}\n")
        writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(row.get(k)) for k in fields})
        return self._write(f"{stem}.csv", buf.getvalue())

    def text(self, name, text):
        return self._write(name, text)

    def csv_text(self, name, text, comment=None):
        head = comment or f"seed={self.cfg.seed} config_digest={self.digest}"
        return self._write(name, f"# {head}\n" + text)

    def model(self, name, model_json):
        doc = {"meta": self.meta}
        doc.update(json.loads(model_json))
        return self._write(name, json.dumps(_plain(doc), indent=2) + "\n")

    def svg(self, name, text):
        return self._write(name, text)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        obj = float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


# --- stages ------------------------------------------------------------------


def stage(name):
    def wrap(fn):
        def run(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except MetapathError as exc:
                raise StageError(name, exc) from exc
        run.__name__ = fn.__name__
        return run
    return wrap


@stage("load")
def load(cfg):
    return read_csv(cfg.input)


@stage("impute")
def stage_impute(raw, w):
    imputed, report = impute_zeros(raw)
    w.table(
        "imputation_report",
        report.to_rows(),
        ("column", "count_replaced_group0", "count_replaced_group1", "median_group0", "median_group1"),
    )
    w.csv_text("imputed.csv", serialize_csv(imputed))
    return imputed


TTEST_FIELDS = ("variable", "mean0", "mean1", "t_stat", "df", "p_value", "p_display", "n0", "n1")


@stage("ttest")
def stage_ttest(imputed, w):
    tests = outcome_t_tests(imputed)
    rows = [
        {
            "variable": name,
            "mean0": r.mean0,
            "mean1": r.mean1,
            "t_stat": r.t_stat,
            "df": r.df,
            "p_value": r.p_two_sided,
            "p_display": format_p(r.p_two_sided),
            "n0": r.n0,
            "n1": r.n1,
        }
        for name, r in tests.items()
    ]
    w.table("ttest", rows, TTEST_FIELDS)
    return tests


@stage("corr")
def stage_corr(imputed, w):
    corr = correlation_matrix(imputed)
    rows = [dict({"variable": a}, **{b: float(corr.r[i, j]) for j, b in enumerate(corr.labels)})
            for i, a in enumerate(corr.labels)]
    w.table("correlation", rows, ("variable",) + corr.labels)
    w.svg("correlation.svg", emit_svg_heatmap(corr, _svg_meta(w)))
    return corr


@stage("pca")
def stage_pca(imputed, w):
    model = fit_pca(imputed)
    w.model("pca_model.json", model.to_json())
    rows = [
        {
            "component": i + 1,
            "eigenvalue": float(lam),
            "explained_fraction": float(f),
            "cumulative_fraction": float(c),
        }
        for i, (lam, f, c) in enumerate(
            zip(model.eigenvalues, model.explained_fraction, model.cumulative_fraction)
        )
    ]
    w.table("pca_variance", rows, ("component", "eigenvalue", "explained_fraction", "cumulative_fraction"))
    w.svg("scree.svg", emit_svg_scree(model, _svg_meta(w)))
    return model


@stage("split")
def stage_split(raw, cfg, w):
    split = train_test_split(raw.n_rows, cfg.test_fraction, cfg.seed)
    rows = [{"row": i, "set": "test"} for i in split.test] + [{"row": i, "set": "train"} for i in split.train]
    w.table("split", rows, ("row", "set"))
    return split


WALD_FIELDS = ("feature", "coefficient", "std_error", "z", "p_value", "p_display")


@stage("train")
def stage_train(raw, imputed, pca_model, cfg, w):
    # full-data multivariate fit on the raw predictors (Wald table)
    full = fit_irls(imputed.matrix(PREDICTORS), imputed.outcome(), feature_names=PREDICTORS)
    wald = full.table()
    for row in wald:
        row["p_display"] = format_p(row["p_value"])
    w.table("wald", wald, WALD_FIELDS)
    w.model("wald_model.json", full.to_json())
    ev = evaluate_split(raw, cfg.pipeline(), cfg.seed, imputed, None if cfg.leakage_free else pca_model)
    w.model("model.json", ev.model.to_json())
    return full, ev


METRIC_FIELDS = ("tn", "fp", "fn", "tp", "accuracy", "precision", "recall", "specificity", "f1")


@stage("evaluate")
def stage_evaluate(ev, w):
    row = dict(asdict(ev.confusion), **asdict(ev.metrics))
    w.table("metrics", [row], METRIC_FIELDS)
    w.svg("confusion.svg", emit_svg_confusion(ev.confusion, _svg_meta(w)))
    return row


ENRICH_FIELDS = ("pathway_id", "name", "N", "K", "n", "k", "p_raw", "p_adjusted", "overlap")
TARGET_FIELDS = (
    "rank", "intervention", "drug_class", "exemplar", "pathway_id", "pathway_name",
    "p_raw", "p_adjusted", "overlap_size", "pathway_size",
)


def load_mapping(cfg):
    if cfg.mapping in (None, "demo"):
        return demo_mapping()
    return PredictorMapping.from_toml(_read_text(cfg.mapping))


def load_targets(cfg):
    if cfg.targets in (None, "demo"):
        return default_targets()
    return TargetKnowledge.from_toml(_read_text(cfg.targets))


def load_pathway_db(cfg, mapping, args):
    background = getattr(args, "background", None) or mapping.background or DEFAULT_BACKGROUND
    link_file = getattr(args, "link_file", None)
    list_file = getattr(args, "list_file", None)
    if link_file:
        return PathwayDb.from_kegg(
            _read_text(link_file), _read_text(list_file) if list_file else None, background
        )
    if cfg.mapping in (None, "demo"):
        return demo_pathway_db(background)
    fetcher = KeggFetcher(cfg.base_url, cfg.cache_dir, cfg.offline)
    org = getattr(args, "org", "hsa")
    return PathwayDb.from_kegg(fetcher.link_pathway(org), fetcher.list_pathway(org), background)


def _read_text(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


@stage("enrich")
def stage_enrich(predictors, cfg, args, w):
    mapping = load_mapping(cfg)
    db = load_pathway_db(cfg, mapping, args)
    genes = map_predictors(predictors, mapping)
    results = enrich(genes, db)
    rows = [dict(asdict(r), overlap=";".join(r.overlap)) for r in results]
    w.table(
        "enrichment", rows, ENRICH_FIELDS,
        extra_json={"predictors": list(predictors), "query_genes": genes},
    )
    w.svg("enrichment.svg", emit_svg_enrichment(results, _svg_meta(w)))
    return results, db


@stage("targets")
def stage_targets(results, db, cfg, w):
    knowledge = load_targets(cfg)
    unresolved = knowledge.unresolved(db)
    ranked = rank_targets(results, knowledge)
    w.table("targets", [asdict(t) for t in ranked], TARGET_FIELDS,
            extra_json={"unresolved_pathways": unresolved})
    return ranked


def _svg_meta(w):
    return f"seed={w.cfg.seed} config_digest={w.digest}"


# --- argument parsing ----------------------------------------------------------


def _common(p, need_input=True):
    if need_input:
        p.add_argument("--input", required=True, help="PIMA-format CSV")
    p.add_argument("--out-dir", default="out", help="directory for artifacts (default: out)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--components", type=int, default=5)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--leakage-free", action="store_true",
                   help="impute and fit PCA on the training fold only")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-v", "--verbose", action="store_true")


def _enrich_opts(p):
    p.add_argument("--mapping", default=None,
                   help='predictor->gene TOML, or "demo" for the bundled example mapping')
    p.add_argument("--targets", default=None, help="pathway->intervention TOML (default: bundled)")
    p.add_argument("--link-file", default=None, help="KEGG link/pathway flat file")
    p.add_argument("--list-file", default=None, help="KEGG list/pathway flat file")
    p.add_argument("--background", type=int, default=None, help="background gene count N")
    p.add_argument("--org", default="hsa")
    p.add_argument("--base-url", default=DEFAULT_BASE_URL)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--offline", action="store_true", help="never touch the network")


def build_parser():
    ap = argparse.ArgumentParser(prog="metapath", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("impute", "zero-coded missing values -> outcome-group medians"),
        ("ttest", "Welch t-test per predictor by outcome"),
        ("corr", "Pearson correlation matrix + heatmap"),
        ("pca", "PCA on the correlation matrix + scree plot"),
        ("split", "seeded train/test split"),
        ("train", "Wald table (full data) and PCA-score model (train fold)"),
        ("evaluate", "confusion matrix and metrics on the test fold"),
    ):
        _common(sub.add_parser(name, help=helptext))
    p = sub.add_parser("sweep", help="accuracy over many split seeds")
    _common(p)
    p.add_argument("--seeds", type=int, default=200, help="number of seeds")
    p.add_argument("--seed-start", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    for name, helptext in (("enrich", "hypergeometric pathway enrichment"),
                           ("targets", "rank interventions of enriched pathways")):
        p = sub.add_parser(name, help=helptext)
        _common(p, need_input=False)
        _enrich_opts(p)
        p.add_argument("--predictors", default=",".join(DEFAULT_QUERY_PREDICTORS),
                       help="comma-separated predictor names")
    p = sub.add_parser("fetch-db", help="download KEGG link/list files into the cache")
    p.add_argument("--org", default="hsa")
    p.add_argument("--base-url", default=DEFAULT_BASE_URL)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--offline", action="store_true")
    p.add_argument("--out-dir", default=None, help="also copy the files here")
    p.add_argument("-v", "--verbose", action="store_true")
    p = sub.add_parser("report", help="full pipeline")
    _common(p)
    _enrich_opts(p)
    return ap


def _config(args):
    return RunConfig(
        input=getattr(args, "input", None),
        out_dir=args.out_dir,
        seed=args.seed,
        test_fraction=args.test_fraction,
        n_components=args.components,
        threshold=args.threshold,
        leakage_free=args.leakage_free,
        offline=getattr(args, "offline", False),
        format=args.format,
        mapping=getattr(args, "mapping", None),
        targets=getattr(args, "targets", None),
        base_url=getattr(args, "base_url", DEFAULT_BASE_URL),
        cache_dir=getattr(args, "cache_dir", None),
    )


def _check_input(path):
    if not path or not os.path.isfile(path) or not os.access(path, os.R_OK):
        raise InputError(f"cannot read input file {path!r}")


def run(args):
    if args.command == "fetch-db":
        return _fetch_db(args)

    cfg = _config(args)
    if cfg.input is not None:
        _check_input(cfg.input)
    extra = {"command": args.command}
    if args.command == "sweep":
        extra.update(seeds=args.seeds, seed_start=args.seed_start)
    if args.command in ("enrich", "targets"):
        extra.update(predictors=args.predictors)
    for key in ("link_file", "list_file"):
        if getattr(args, key, None):
            extra[key] = _maybe_digest(getattr(args, key))
    if getattr(args, "background", None):
        extra["background"] = args.background
    w = ArtifactWriter(cfg.out_dir, cfg, config_digest(cfg, extra))
    cmd = args.command

    if cmd in ("enrich", "targets"):
        predictors = [s.strip() for s in args.predictors.split(",") if s.strip()]
        results, db = stage_enrich(predictors, cfg, args, w)
        if cmd == "targets":
            stage_targets(results, db, cfg, w)
        return EXIT_OK

    raw = load(cfg)
    if cmd == "split":
        stage_split(raw, cfg, w)
        return EXIT_OK
    if cmd == "sweep":
        _sweep(raw, cfg, args, w)
        return EXIT_OK

    imputed = stage_impute(raw, w)
    if cmd == "impute":
        return EXIT_OK
    if cmd in ("ttest", "report"):
        stage_ttest(imputed, w)
    if cmd in ("corr", "report"):
        stage_corr(imputed, w)
    if cmd == "ttest" or cmd == "corr":
        return EXIT_OK
    pca_model = stage_pca(imputed, w)
    if cmd == "pca":
        return EXIT_OK
    if cmd == "report":
        stage_split(raw, cfg, w)
    full, ev = stage_train(raw, imputed, pca_model, cfg, w)
    if cmd == "train":
        return EXIT_OK
    stage_evaluate(ev, w)
    if cmd == "evaluate":
        return EXIT_OK

    # report: enrichment (when a mapping is configured) on the Wald-significant predictors
    if cfg.mapping is not None:
        significant = [
            name for name, p in zip(full.feature_names[1:], full.p_values[1:]) if p < 0.05
        ]
        if significant:
            results, db = stage_enrich(significant, cfg, args, w)
            stage_targets(results, db, cfg, w)
    w.json_doc("manifest.json", {"artifacts": sorted(w.written + ["manifest.json"])})
    return EXIT_OK


@stage("sweep")
def _sweep(raw, cfg, args, w):
    seeds = range(args.seed_start, args.seed_start + args.seeds)
    results, summary = seed_sweep(raw, cfg.pipeline(), seeds, workers=args.workers)
    rows = sweep_rows(results)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(SWEEP_FIELDS), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row[k]) for k in SWEEP_FIELDS})
    w.csv_text("sweep.csv", buf.getvalue(),
               f"seeds={seeds.start}..{seeds.stop - 1} config_digest={w.digest}")
    w.json_doc("sweep_summary.json", {"seeds": [seeds.start, seeds.stop - 1],
                                      "summary": asdict(summary)})
    return summary


def _fetch_db(args):
    fetcher = KeggFetcher(args.base_url, args.cache_dir, args.offline)
    try:
        texts = {
            f"link_pathway_{args.org}.tsv": fetcher.link_pathway(args.org),
            f"list_pathway_{args.org}.tsv": fetcher.list_pathway(args.org),
        }
    except MetapathError as exc:
        raise StageError("fetch-db", exc) from exc
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in texts.items():
            (out / name).write_text(text, encoding="utf-8")
    print(f"cached {len(texts)} file(s) under {fetcher.cache_dir}")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return run(args)
    except StageError as exc:
        print(f"metapath: error: {exc}", file=sys.stderr)
        return EXIT_IO if isinstance(exc.exc, InputError) else EXIT_COMPUTE
    except InputError as exc:
        print(f"metapath: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ComputationError as exc:
        print(f"metapath: error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"metapath: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
