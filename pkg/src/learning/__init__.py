"""Tabular learners over product states."""

from src.learning.evaluation import CurvePoint, EvaluationStats, LearningCurve, evaluate
from src.learning.hierarchical import (
    HierarchicalGreedyPolicy,
    NoAvailableOption,
    Option,
    build_options,
    hierarchical_train,
)
from src.learning.policies import (
    GreedyTablePolicy,
    Policy,
    RandomPolicy,
    ScriptedPolicy,
    select_action_epsilon_greedy,
)
from src.learning.q_learning import TrainingResult, q_learning_train
from src.learning.tables import AbstractionSpec, ActionValueTable, Hyperparams

__all__ = [
    "AbstractionSpec",
    "ActionValueTable",
    "CurvePoint",
    "EvaluationStats",
    "GreedyTablePolicy",
    "HierarchicalGreedyPolicy",
    "Hyperparams",
    "LearningCurve",
    "NoAvailableOption",
    "Option",
    "Policy",
    "RandomPolicy",
    "ScriptedPolicy",
    "TrainingResult",
    "build_options",
    "evaluate",
    "hierarchical_train",
    "q_learning_train",
    "select_action_epsilon_greedy",
]
