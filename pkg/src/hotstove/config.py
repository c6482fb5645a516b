"""JSON experiment configs: pydantic schema and conversion to engine objects."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from hotstove import distributions as d
from hotstove import learners as ln
from hotstove import policies as pol
from hotstove.engine import ExperimentConfig
from hotstove.stats import HistogramBins

PositiveFloat = Annotated[float, Field(gt=0, allow_inf_nan=False)]
FiniteFloat = Annotated[float, Field(allow_inf_nan=False)]
SampleSize = Annotated[int, Field(ge=1, lt=2**31)]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class _Buildable(_Model):
    """Runs the domain constructor during validation so its errors carry a field path."""

    @model_validator(mode="after")
    def _domain_check(self):
        self.build()
        return self


class NormalModel(_Model):
    type: Literal["normal"]
    mean: FiniteFloat = 0.0
    variance: PositiveFloat = 1.0

    def build(self):
        return d.Normal(self.mean, self.variance)


class LaplaceModel(_Model):
    type: Literal["laplace"]
    mean: FiniteFloat = 0.0
    scale: PositiveFloat = 1.0

    def build(self):
        return d.Laplace(self.mean, self.scale)


class DiscreteSymmetricModel(_Buildable):
    type: Literal["discrete_symmetric"]
    center: FiniteFloat = 0.0
    offsets: list[tuple[FiniteFloat, Annotated[float, Field(gt=0, le=1)]]] = Field(min_length=1)

    def build(self):
        return d.DiscreteSymmetric(self.center, tuple(self.offsets))


class FiniteDiscreteModel(_Buildable):
    type: Literal["finite_discrete"]
    support: list[tuple[FiniteFloat, Annotated[float, Field(gt=0, le=1)]]] = Field(min_length=1)

    def build(self):
        return d.FiniteDiscrete(tuple(self.support))


PayoffModel = Annotated[
    Union[NormalModel, LaplaceModel, DiscreteSymmetricModel, FiniteDiscreteModel],
    Field(discriminator="type"),
]


class FixedMeanModel(_Model):
    type: Literal["fixed_mean"]
    payoff: PayoffModel

    def build(self):
        return d.FixedMean(self.payoff.build())


class HierarchicalNormalModel(_Model):
    type: Literal["hierarchical_normal"]
    prior_mean: FiniteFloat = 0.0
    prior_variance: PositiveFloat = 1.0
    noise_variance: PositiveFloat = 1.0

    def build(self):
        return d.HierarchicalNormal(self.prior_mean, self.prior_variance, self.noise_variance)


class AveragingModel(_Model):
    type: Literal["averaging"]

    def build(self):
        return ln.Averaging()


class RecencyModel(_Model):
    type: Literal["recency"]
    weight: Annotated[float, Field(gt=0, lt=1)]
    initial: FiniteFloat = 0.0

    def build(self):
        return ln.RecencyWeighted(self.weight, self.initial)


class BayesianModel(_Model):
    type: Literal["bayesian"]
    prior_mean: FiniteFloat = 0.0
    prior_variance: PositiveFloat = 1.0
    noise_variance: PositiveFloat = 1.0

    def build(self):
        return ln.BayesianNormal(self.prior_mean, self.prior_variance, self.noise_variance)


class StepModel(_Model):
    type: Literal["step"]
    threshold: FiniteFloat = 0.0
    high: SampleSize
    low: SampleSize

    def build(self):
        return pol.Step(self.threshold, self.high, self.low)


class AffineModel(_Model):
    type: Literal["affine"]
    base: FiniteFloat
    slope: FiniteFloat

    def build(self):
        return pol.AffineMonotone(self.base, self.slope)


class ConstantModel(_Model):
    type: Literal["constant"]
    n: SampleSize

    def build(self):
        return pol.Constant(self.n)


class HistogramModel(_Model):
    count: Annotated[int, Field(ge=2)]
    min: FiniteFloat
    max: FiniteFloat

    @model_validator(mode="after")
    def _ordered(self):
        if not self.min < self.max:
            raise ValueError("min must be < max")
        return self


class ExperimentModel(_Model):
    """Top-level experiment config file."""

    id: str = "experiment"
    environment: Annotated[Union[FixedMeanModel, HierarchicalNormalModel], Field(discriminator="type")]
    learner: Annotated[Union[AveragingModel, RecencyModel, BayesianModel], Field(discriminator="type")]
    policy: Annotated[Union[StepModel, AffineModel, ConstantModel], Field(discriminator="type")]
    k: Annotated[int, Field(ge=1)]
    trials: Annotated[int, Field(ge=1)]
    seed: Annotated[int, Field(ge=0, lt=2**64)]
    histogram_bins: Optional[HistogramModel] = None

    def build(self) -> ExperimentConfig:
        """Engine config; raises IncompatibleConfig for a bad learner/environment pair."""
        bins = self.histogram_bins
        return ExperimentConfig(
            environment=self.environment.build(),
            learner=self.learner.build(),
            policy=self.policy.build(),
            k=self.k,
            trials=self.trials,
            seed=self.seed,
            histogram_bins=HistogramBins(bins.count, bins.min, bins.max) if bins else None,
            config_id=self.id,
        )


class ConfigError(ValueError):
    """Config file failed schema validation; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _loc(loc) -> str:
    return ".".join(str(p) for p in loc) or "<root>"


def parse_config(data: dict) -> ExperimentModel:
    try:
        return ExperimentModel.model_validate(data)
    except ValidationError as exc:
        err = exc.errors()[0]
        raise ConfigError(_loc(err["loc"]), err["msg"]) from exc


def load_config(path) -> ExperimentModel:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc}") from exc
    return parse_config(data)


def config_schema() -> dict:
    return ExperimentModel.model_json_schema()


def _dist_dict(dist) -> dict:
    if isinstance(dist, d.Normal):
        return {"type": "normal", "mean": dist.mean, "variance": dist.variance}
    if isinstance(dist, d.Laplace):
        return {"type": "laplace", "mean": dist.mean, "scale": dist.scale}
    if isinstance(dist, d.DiscreteSymmetric):
        return {"type": "discrete_symmetric", "center": dist.center, "offsets": [list(o) for o in dist.offsets]}
    return {"type": "finite_discrete", "support": [list(s) for s in dist.support]}


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Inverse of ``parse_config(...).build()``, for manifests."""
    env = cfg.environment
    if isinstance(env, d.FixedMean):
        env_d = {"type": "fixed_mean", "payoff": _dist_dict(env.payoff)}
    else:
        env_d = {"type": "hierarchical_normal", "prior_mean": env.prior_mean,
                 "prior_variance": env.prior_variance, "noise_variance": env.noise_variance}
    lr = cfg.learner
    if isinstance(lr, ln.Averaging):
        lr_d = {"type": "averaging"}
    elif isinstance(lr, ln.RecencyWeighted):
        lr_d = {"type": "recency", "weight": lr.weight, "initial": lr.initial}
    else:
        lr_d = {"type": "bayesian", "prior_mean": lr.prior_mean,
                "prior_variance": lr.prior_variance, "noise_variance": lr.noise_variance}
    p = cfg.policy
    if isinstance(p, pol.Step):
        p_d = {"type": "step", "threshold": p.threshold, "high": p.high, "low": p.low}
    elif isinstance(p, pol.AffineMonotone):
        p_d = {"type": "affine", "base": p.base, "slope": p.slope}
    else:
        p_d = {"type": "constant", "n": p.n}
    out = {"id": cfg.config_id, "environment": env_d, "learner": lr_d, "policy": p_d,
           "k": cfg.k, "trials": cfg.trials, "seed": cfg.seed}
    if cfg.histogram_bins:
        b = cfg.histogram_bins
        out["histogram_bins"] = {"count": b.count, "min": b.min, "max": b.max}
    return out
