"""Auditing an induced shift by counting.

Starting from a labelled table with a binned covariate, we build shifted
evaluation sets by over-sampling one bin, then check that the label rate
inside every bin is unchanged.  A table whose labels were flipped in one bin
fails the audit.  Note that the audit says nothing about P(X|Y,V).
"""
from antishift import dgp, shiftcheck
from antishift.runner import scenario
from antishift.shiftcheck import LabeledTable

data = dgp.sample(scenario(1).dgp_source, 50_000, 0)
source = LabeledTable("source", data.v.astype(str), data.y, ("y",), ("0", "1"))

targets = [shiftcheck.subsample_shift(source, "1", f, 10_000, i)
           for i, f in enumerate((0.25, 0.5, 0.7, 0.9))]
report = shiftcheck.audit(source, targets)
for e in report.entries:
    print(f"{e.set_id:>8}  bin {e.v_bin}  P(y=1|bin) = {e.estimate:.4f}  n = {e.count}")
print("verdict:", report.verdict, f"(max deviation {report.overall_max:.4f})")

bad = targets[-1]
labels = bad.labels.copy()
labels[bad.v_bins == "1"] ^= 1
flipped = LabeledTable("flipped", bad.v_bins, labels, bad.label_names, bad.vocabulary)
print("flipped table verdict:", shiftcheck.audit(source, [flipped]).verdict)
print(report.note)
