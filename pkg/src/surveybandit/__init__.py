"""Contextual UCB bandits that shrink the set of user features they query."""

from .confidence import ArmHistory, ConfidenceSet, alg_confidence, init_confidence, max_abs_coord, truncate_support, ucb_value
from .errors import (ConfigError, ConvergenceError, IncompleteObservationError, InvariantViolation,
                     NumericalSingularityError, ScheduleError, SurveyBanditError)
from .estimators import NoiseAndBounds, RegressionData, elastic_net_fit, ridge_fit
from .interactive import ContextBox, PartialObservation, interactive_round, optimistic_bound
from .policy import PolicyConfig, PolicyState, init_state, select_arm, select_survey, theoretical_regret_bound, update
from .simulator import Environment, Trajectory, aggregate, coverage_check, study_environment, run

__version__ = "0.1.0"
