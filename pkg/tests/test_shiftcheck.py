import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antishift import dgp, shiftcheck
from antishift.errors import InsufficientRowsError, VocabularyMismatchError
from antishift.runner import scenario
from antishift.shiftcheck import LabeledTable

S1 = scenario(1).dgp_source
VOCAB = ("0", "1")


def scenario_table(n=100_000, seed=0, set_id="source"):
    """Binary V and Y drawn with Scenario 1's P(V) and P(Y|V)."""
    data = dgp.sample(S1, n, seed)
    return LabeledTable(set_id, data.v.astype(str), data.y, ("y",), VOCAB)


SOURCE = scenario_table()


def test_subsample_exact_quota():
    t = shiftcheck.subsample_shift(SOURCE, "1", 0.7, 1000, 0)
    assert len(t) == 1000
    assert int((t.v_bins == "1").sum()) == 700
    assert t.set_id == "70% 1"


def test_subsample_fraction_one_and_source_share():
    t = shiftcheck.subsample_shift(SOURCE, "1", 1.0, 500, 1)
    assert set(t.v_bins) == {"1"}
    share = float((SOURCE.v_bins == "1").mean())
    t = shiftcheck.subsample_shift(SOURCE, "1", share, 1000, 2)
    assert abs((t.v_bins == "1").mean() - share) <= 1 / 1000


def test_subsample_deterministic():
    a = shiftcheck.subsample_shift(SOURCE, "1", 0.6, 800, 9)
    b = shiftcheck.subsample_shift(SOURCE, "1", 0.6, 800, 9)
    np.testing.assert_array_equal(a.labels, b.labels)
    np.testing.assert_array_equal(a.v_bins, b.v_bins)


def test_subsample_insufficient_rows_names_stratum():
    small = scenario_table(50, 3)
    with pytest.raises(InsufficientRowsError, match="'1'"):
        shiftcheck.subsample_shift(small, "1", 1.0, 50, 0)
    with pytest.raises(InsufficientRowsError, match="other than"):
        shiftcheck.subsample_shift(small, "1", 0.0, 50, 0)


def test_estimate_cond_examples():
    t = LabeledTable("a", ["x", "x"], [1, 1], ("y",), ("x", "z"))
    est = shiftcheck.estimate_cond(t)
    assert est["y", "x"].estimate == 1.0 and est["y", "x"].count == 2
    assert est["y", "z"].estimate is None and est["y", "z"].count == 0


def test_estimate_cond_binomial_bound():
    est = shiftcheck.estimate_cond(SOURCE)
    for v in (0, 1):
        q = dgp.cond_y_given_v(S1, v)
        e = est["y", str(v)]
        assert abs(e.estimate - q) <= 4 * math.sqrt(q * (1 - q) / e.count)
    assert sum(est["y", b].count for b in VOCAB) == len(SOURCE)


def test_audit_identity():
    rep = shiftcheck.audit(SOURCE, [SOURCE.take(np.arange(len(SOURCE)), "copy")])
    assert rep.overall_max == 0.0 and rep.verdict == "cause_consistent"
    assert "not verified" in rep.note


def test_audit_subsampled_targets_consistent():
    targets = [shiftcheck.subsample_shift(SOURCE, "1", f, 20_000, i)
               for i, f in enumerate((0.25, 0.5, 0.7, 0.9))]
    rep = shiftcheck.audit(SOURCE, targets, tolerance=0.05)
    assert rep.verdict == "cause_consistent"


def test_audit_label_flip_inconsistent():
    t = shiftcheck.subsample_shift(SOURCE, "1", 0.5, 5000, 0)
    labels = t.labels.copy()
    labels[t.v_bins == "1"] ^= 1
    flipped = LabeledTable("flip", t.v_bins, labels, t.label_names, t.vocabulary)
    rep = shiftcheck.audit(SOURCE, [flipped])
    assert rep.verdict == "inconsistent"
    assert rep.max_deviation["y"] > 0.5


def test_audit_min_bin_excludes_small_bins():
    src = LabeledTable("s", ["a"] * 40 + ["b"] * 5, [1] * 40 + [0] * 5, ("y",), ("a", "b"))
    tgt = LabeledTable("t", ["a"] * 40 + ["b"] * 5, [1] * 40 + [1] * 5, ("y",), ("a", "b"))
    rep = shiftcheck.audit(src, [tgt], min_bin=30)
    assert rep.verdict == "cause_consistent"
    excluded = [e for e in rep.entries if e.set_id == "t" and e.v_bin == "b"]
    assert excluded and not excluded[0].included and excluded[0].deviation == 1.0
    with pytest.raises(InsufficientRowsError):
        shiftcheck.audit(src, [tgt], min_bin=100)


def test_audit_vocabulary_mismatch():
    other = LabeledTable("o", ["0"], [1], ("y",), ("0", "2"))
    with pytest.raises(VocabularyMismatchError):
        shiftcheck.audit(SOURCE, [other])
    with pytest.raises(VocabularyMismatchError):
        LabeledTable("bad", ["9"], [1], ("y",), VOCAB)


def test_subsampling_preserves_conditionals_on_average():
    base = scenario_table(4000, 11)
    src = shiftcheck.estimate_cond(base)
    devs = {b: [] for b in VOCAB}
    for r in range(200):
        t = shiftcheck.subsample_shift(base, "1", 0.8, 500, r)
        est = shiftcheck.estimate_cond(t)
        for b in VOCAB:
            devs[b].append(est["y", b].estimate)
    for b in VOCAB:
        q = src["y", b].estimate
        count = 400 if b == "1" else 100
        sigma = math.sqrt(q * (1 - q) / count / 200)
        assert abs(np.mean(devs[b]) - q) <= 4 * sigma


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.3, 0.6, 0.9]))
def test_audit_invariant_to_row_order_and_set_ids(seed, frac):
    base = scenario_table(3000, 5)
    target = shiftcheck.subsample_shift(base, "1", frac, 1000, seed)
    perm = np.random.default_rng(seed).permutation(len(target))
    shuffled = target.take(perm, "renamed")
    a = shiftcheck.audit(base, [target])
    b = shiftcheck.audit(base.take(np.arange(len(base))[::-1], "other"), [shuffled])
    assert a.verdict == b.verdict
    assert a.max_deviation == pytest.approx(b.max_deviation, abs=1e-15)


def test_table_roundtrip_and_report_csv(tmp_path):
    tables = [SOURCE.take(np.arange(100), "source"),
              shiftcheck.subsample_shift(SOURCE, "1", 0.9, 100, 0)]
    path = tmp_path / "t.csv"
    shiftcheck.write_tables(path, tables)
    back = shiftcheck.read_tables(path, VOCAB)
    assert [t.set_id for t in back] == ["source", "90% 1"]
    np.testing.assert_array_equal(back[1].labels, tables[1].labels)
    out = tmp_path / "r.csv"
    shiftcheck.audit(back[0], back[1:], min_bin=5).write_csv(out)
    text = out.read_text()
    assert text.startswith("set,label,v_bin,estimate,count,abs_deviation,included")
    assert "#verdict=" in text


def test_read_tables_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,bin,y\n")
    with pytest.raises(ValueError):
        shiftcheck.read_tables(path)
