"""Diversity-aware scheduling of RSU-to-server uplinks.

Coalition-based RSU selection over heterogeneous lossy channels, fairness
over received class labels, slot-matrix construction, and min-margin
sample picking, wrapped in a seeded interval simulator.
"""
__version__ = "0.1.0"

from .channel import (ChannelConfig, ChannelState, effective_throughput, expected_delay,
                      sample_channel_conditions, sample_packet_service)
from .coalition import (ShapleyResult, best_coalition, enumerate_best_coalition, greedy_coalition,
                        shapley_ranking, shapley_values)
from .errors import ConfigError, DomainError, InfeasibleError, LimitExceededError
from .metrics import (AccumulatorState, CoalitionValue, IntervalSnapshot, NormalizationStats,
                      PolicyWeights, coalition_value, delay_objective, fairness_objective,
                      jain_index, throughput_objective)
from .policies import PolicyKind, plan_interval
from .schedule import ScheduleMatrix, build_matrix, verify_matrix
from .selection import (ProxyClassifier, class_quota, margin, min_margin_select,
                        train_proxy_classifier)
from .sim import IntervalRecord, RunSummary, SimConfig, SimState, grid_search_alpha, run_simulation, step_interval
