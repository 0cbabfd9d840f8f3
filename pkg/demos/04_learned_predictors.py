"""Learned predictors next to their closed-form counterparts.

Each model is a small tanh network trained on fresh draws from the source
distribution.  The invariant variant reweights samples so that Y and V are
independent and penalises the MMD between the V=0 and V=1 representations.
Runs in about ten seconds on one core.
"""
from antishift import dgp, metrics
from antishift.learn import TrainConfig, train_invariant, train_plain
from antishift.posterior import ClosedFormPredictor
from antishift.runner import scenario

source = scenario(3).dgp_source
config = TrainConfig(steps=512, batch_size=2**13, seed=1)

models = {
    "closed form P(Y|X)": ClosedFormPredictor(source, "X"),
    "closed form P(Y|X,V)": ClosedFormPredictor(source, "XV"),
    "learned P(Y|X)": train_plain(source, "X", config),
    "learned P(Y|X,V)": train_plain(source, "XV", config),
    "invariant P(Y|X)": train_invariant(source, TrainConfig(steps=512, batch_size=2**13, seed=1,
                                                            mmd_weight=1e-2)),
}

grid = (0.2, 0.5, 0.8, 0.95)
print(f"{'accuracy':<22}" + "".join(f"p={p:<7}" for p in grid))
for name, model in models.items():
    row = [metrics.evaluate(model, dgp.shift(source, p), 2**15, 5)[1].value for p in grid]
    print(f"{name:<22}" + "".join(f"{a:<9.4f}" for a in row))
