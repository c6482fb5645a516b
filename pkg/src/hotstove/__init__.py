"""Adaptive-sample-size learning: simulation, enumeration and closed forms.

A learner samples an alternative ``k`` times, forms a belief, then samples it
``n(belief)`` more times. When ``n`` grows with the belief, the final belief
is pulled below the true mean (averaging and recency learners) or is
below the prior mean for most learners (Bayesian learners).
"""

from hotstove.distributions import (
    DiscreteSymmetric,
    FiniteDiscrete,
    FixedMean,
    HierarchicalNormal,
    Laplace,
    Normal,
)
from hotstove.learners import Averaging, BayesianNormal, RecencyWeighted
from hotstove.policies import AffineMonotone, Constant, Step

__version__ = "0.1.0"

__all__ = [
    "AffineMonotone",
    "Averaging",
    "BayesianNormal",
    "Constant",
    "DiscreteSymmetric",
    "FiniteDiscrete",
    "FixedMean",
    "HierarchicalNormal",
    "Laplace",
    "Normal",
    "RecencyWeighted",
    "Step",
]
