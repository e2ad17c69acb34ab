"""Decentralized ride-sharing: fair cost sharing and stable pair matching."""

from .costsharing import (ALL_MECHANISMS, Mechanism, PaymentProfile, PreferenceOrder, build_preferences,
                          edge_payments, negative_utility_flags, payments)
from .errors import InputError, InvariantError
from .experiment import ExperimentConfig, ExperimentResult, run_experiment, run_on_graph
from .matcher import (Assignment, CyclicPreferenceError, MatchTrace, detect_cycles, find_blocking_pair,
                      is_cyclic_preference, stable_match)
from .metrics import MechanismReport, commuter_distributions
from .optimum import brute_force_optimum, social_optimum
from .planner import (MatchingGraph, SharedRidePlan, TripRequest, build_matching_graph, graph_from_costs,
                      min_cost_sharable_ride)
from .road import FareModel, GeometricNetwork, RoadNetwork, load_road_network, shortest_path
from .workload import Region, TripRecord, generate_workload, ingest_trips

__all__ = [
    "ALL_MECHANISMS", "Assignment", "CyclicPreferenceError", "ExperimentConfig", "ExperimentResult",
    "FareModel", "GeometricNetwork", "InputError", "InvariantError", "MatchTrace", "MatchingGraph",
    "Mechanism", "MechanismReport", "PaymentProfile", "PreferenceOrder", "Region", "RoadNetwork",
    "SharedRidePlan", "TripRecord", "TripRequest", "brute_force_optimum", "build_matching_graph",
    "build_preferences", "commuter_distributions", "detect_cycles", "edge_payments", "find_blocking_pair",
    "generate_workload", "graph_from_costs", "ingest_trips", "is_cyclic_preference", "load_road_network",
    "min_cost_sharable_ride", "negative_utility_flags", "payments", "run_experiment", "run_on_graph",
    "shortest_path", "social_optimum", "stable_match",
]
