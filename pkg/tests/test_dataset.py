import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metapath.dataset import (
    CANONICAL,
    IMPUTABLE,
    PREDICTORS,
    Dataset,
    format_number,
    group_medians,
    group_summary,
    impute_zeros,
    parse_csv,
    serialize_csv,
)
from metapath.errors import (
    BadNumeral,
    DegenerateGroup,
    InputError,
    MissingColumn,
    NonBinary,
    RaggedRow,
    UnknownColumn,
)

HEADER = ",".join(CANONICAL)


def toy(**cols):
    n = len(next(iter(cols.values())))
    base = {c: np.ones(n) for c in CANONICAL}
    base.update({k: np.asarray(v, dtype=float) for k, v in cols.items()})
    return Dataset(base)


def test_header_only_gives_empty_dataset():
    d = parse_csv(HEADER + "\n")
    assert d.n_rows == 0
    assert d.names == list(CANONICAL)


def test_bad_numeral_reports_row_and_column():
    row = ["1"] * 9
    row[1] = "abc"
    with pytest.raises(BadNumeral) as info:
        parse_csv(HEADER + "\n" + ",".join(row) + "\n")
    assert info.value.row == 1
    assert info.value.column == "Glucose"
    assert isinstance(info.value, InputError)


def test_missing_column_and_ragged_row():
    with pytest.raises(MissingColumn):
        parse_csv("Pregnancies,Glucose\n1,2\n")
    with pytest.raises(RaggedRow):
        parse_csv(HEADER + "\n1,2,3\n")


def test_columns_reordered_and_extras_kept():
    cols = list(reversed(CANONICAL)) + ["Extra"]
    line = ",".join(str(i) for i in range(len(cols)))
    d = parse_csv(",".join(cols) + "\n" + line + "\n")
    assert d.names == list(CANONICAL) + ["Extra"]
    assert d["Outcome"][0] == 0.0
    assert d["Extra"][0] == 9.0


def test_bom_crlf_and_comment_lines():
    text = "﻿# seed=1\r\n" + HEADER + "\r\n" + ",".join(["1"] * 9) + "\r\n\r\n"
    d = parse_csv(text.encode("utf-8"))
    assert d.n_rows == 1


def test_dataset_is_immutable():
    d = toy(Glucose=[1, 2])
    with pytest.raises(ValueError):
        d["Glucose"][0] = 5
    with pytest.raises(UnknownColumn):
        d["Nope"]


def test_outcome_must_be_binary():
    with pytest.raises(NonBinary):
        toy(Outcome=[0, 2]).outcome()


def test_round_trip_synthetic(synth_raw):
    again = parse_csv(serialize_csv(synth_raw))
    assert again == synth_raw


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.floats(0, 1e6, allow_nan=False), min_size=8, max_size=8),
                min_size=1, max_size=20),
       st.data())
def test_serialize_parse_round_trip(rows, data):
    y = data.draw(st.lists(st.integers(0, 1), min_size=len(rows), max_size=len(rows)))
    cols = {name: [r[j] for r in rows] for j, name in enumerate(PREDICTORS)}
    cols["Outcome"] = y
    d = Dataset(cols)
    assert parse_csv(serialize_csv(d)) == d


def test_format_number():
    assert format_number(6.0) == "6"
    assert format_number(0.627) == "0.627"
    assert float(format_number(1 / 3)) == 1 / 3


def test_pregnancies_zeros_untouched():
    d = toy(Pregnancies=[0, 0, 3], Glucose=[0, 100, 120], Outcome=[0, 0, 0])
    out, _ = impute_zeros(d)
    assert list(out["Pregnancies"]) == [0, 0, 3]
    assert "Pregnancies" not in IMPUTABLE


def test_insulin_toy_median_of_nonzero_same_group():
    d = toy(Insulin=[0, 10, 30], Outcome=[1, 1, 1])
    out, report = impute_zeros(d)
    assert list(out["Insulin"]) == [20, 10, 30]
    assert report.columns["Insulin"].count_replaced_group1 == 1
    assert report.columns["Insulin"].count_replaced_group0 == 0


def test_groups_are_imputed_separately():
    d = toy(Glucose=[0, 100, 102, 0, 150, 160], Outcome=[0, 0, 0, 1, 1, 1])
    out, _ = impute_zeros(d)
    assert list(out["Glucose"]) == [101, 100, 102, 155, 150, 160]


def test_degenerate_group_raises_only_when_needed():
    d = toy(BMI=[0, 0, 30], Outcome=[0, 0, 1])
    with pytest.raises(DegenerateGroup):
        impute_zeros(d)
    assert math.isnan(group_medians(d)["BMI"][0])


def test_imputation_leaves_no_zeros(synth_raw):
    out, report = impute_zeros(synth_raw)
    for c in IMPUTABLE:
        assert np.all(out[c] != 0)
    assert sum(r["count_replaced_group0"] + r["count_replaced_group1"]
               for r in report.to_rows()) == sum(int((synth_raw[c] == 0).sum()) for c in IMPUTABLE)
    # input untouched
    assert np.any(synth_raw["Insulin"] == 0)


def test_group_summary_constant_column():
    d = toy(Age=[5, 5, 5, 7], Outcome=[0, 0, 0, 1])
    s = group_summary(d, "Age")
    assert s[0].mean == 5 and s[0].sd == 0 and s[0].count == 3
    assert math.isnan(s[1].sd)
