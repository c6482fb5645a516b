import json
from pathlib import Path

import pytest

from hotstove.config import ConfigError, config_schema, config_to_dict, load_config, parse_config
from hotstove.engine import IncompatibleConfig

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def _base(**kw):
    d = {
        "id": "t",
        "environment": {"type": "fixed_mean", "payoff": {"type": "normal", "mean": 0.0, "variance": 1.0}},
        "learner": {"type": "averaging"},
        "policy": {"type": "step", "threshold": 0.0, "high": 10, "low": 1},
        "k": 2,
        "trials": 10,
        "seed": 1,
    }
    d.update(kw)
    return d


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_configs_build_and_round_trip(path):
    cfg = load_config(path).build()
    assert parse_config(config_to_dict(cfg)).build() == cfg


@pytest.mark.parametrize(
    "patch, where",
    [
        (dict(trials=0), "trials"),
        (dict(k=0), "k"),
        (dict(seed=2**64), "seed"),
        (dict(policy={"type": "step", "high": 0, "low": 1}), "policy.step.high"),
        (dict(policy={"type": "wiggle"}), "policy"),
        (dict(extra_field=1), "extra_field"),
        (dict(learner={"type": "recency", "weight": 1.5}), "learner.recency.weight"),
        (dict(histogram_bins={"count": 10, "min": 1.0, "max": 0.0}), "histogram_bins"),
        (
            dict(environment={"type": "fixed_mean", "payoff": {"type": "finite_discrete", "support": [[0, 0.5], [1, 0.4]]}}),
            "environment.fixed_mean.payoff.finite_discrete",
        ),
    ],
)
def test_errors_carry_a_path(patch, where):
    with pytest.raises(ConfigError) as exc:
        parse_config(_base(**patch))
    assert exc.value.path.startswith(where)


def test_incompatible_pairing_is_raised_at_build():
    model = parse_config(_base(learner={"type": "bayesian"}))
    with pytest.raises(IncompatibleConfig):
        model.build()


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(p)


def test_schema_lists_top_level_fields():
    props = config_schema()["properties"]
    assert {"environment", "learner", "policy", "k", "trials", "seed"} <= set(props)
    json.dumps(config_schema())
