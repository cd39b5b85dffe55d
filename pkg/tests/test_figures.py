import xml.etree.ElementTree as ET

import numpy as np

from metapath.dataset import PREDICTORS, impute_zeros
from metapath.enrichment import EnrichmentResult
from metapath.evaluation import ConfusionMatrix
from metapath.figures import (
    diverging_color,
    emit_svg_confusion,
    emit_svg_enrichment,
    emit_svg_heatmap,
    emit_svg_scree,
)
from metapath.pca import PcaModel, StandardizationParams, fit_pca
from metapath.stattests import CorrelationMatrix

NS = "{http://www.w3.org/2000/svg}"


def parse(svg):
    return ET.fromstring(svg.encode("utf-8"))


def texts(root):
    return [t.text for t in root.iter(NS + "text")]


def test_heatmap_identity_diagonal_is_saturated():
    cm = CorrelationMatrix(PREDICTORS, np.eye(8))
    root = parse(emit_svg_heatmap(cm))
    fills = [r.get("fill") for r in root.iter(NS + "rect")][1:]  # skip background
    assert len(fills) == 64
    for i in range(8):
        for j in range(8):
            assert fills[8 * i + j] == (diverging_color(1.0) if i == j else "#ffffff")
    assert diverging_color(1.0) == "#b2182b" and diverging_color(-1.0) == "#2166ac"


def test_confusion_tiles_show_counts():
    root = parse(emit_svg_confusion(ConfusionMatrix(89, 12, 21, 31), meta="seed=1"))
    t = texts(root)
    for count in ("89", "12", "21", "31"):
        assert count in t
    assert root.find(NS + "desc").text == "seed=1"


def test_empty_enrichment_placeholder():
    assert "no enriched pathways" in texts(parse(emit_svg_enrichment([])))


def test_enrichment_bars():
    rs = [EnrichmentResult("hsa1", "A - x", 100, 10, 5, 3, 1e-4, 1e-3, ("1", "2", "3")),
          EnrichmentResult("hsa2", "B - x", 100, 10, 5, 1, 0.3, 0.3, ("4",))]
    root = parse(emit_svg_enrichment(rs))
    assert "A" in texts(root) and "3/10" in texts(root)


def test_scree_annotations(synth_raw):
    m = fit_pca(impute_zeros(synth_raw)[0])
    svg = emit_svg_scree(m)
    t = texts(parse(svg))
    assert f"{100 * m.cumulative_fraction[4]:.1f}%" in t
    assert "100.0%" in t
    assert svg == emit_svg_scree(m)


def test_scree_single_component():
    params = StandardizationParams(("Glucose",), np.zeros(1), np.ones(1))
    m = PcaModel(params, np.array([1.0]), np.eye(1))
    root = parse(emit_svg_scree(m))
    assert len(list(root.iter(NS + "circle"))) == 1
    assert "100.0%" in texts(root)


def test_figures_are_byte_stable():
    cm = CorrelationMatrix(PREDICTORS, np.full((8, 8), 0.3) + 0.7 * np.eye(8))
    assert emit_svg_heatmap(cm, "m") == emit_svg_heatmap(cm, "m")
    c = ConfusionMatrix(1, 2, 3, 4)
    assert emit_svg_confusion(c) == emit_svg_confusion(c)
