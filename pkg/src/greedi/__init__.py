"""Distributed submodular maximization over simulated machines."""
from .core import (GreediError, GroundSet, NumericalError, Objective, PreconditionError,
                   SetFunction, SizeLimitError, Solution, marginal_gain, verify_monotone,
                   verify_submodular)
from .objectives import (Coverage, DPPLogDet, ExemplarObjective, GraphCut, GraphDataset,
                         InformationGain, Modular, SEKernel, SetSystemDataset, VectorDataset,
                         coverage, dpp_logdet, exemplar_loss, exemplar_utility, graph_cut,
                         info_gain, lipschitz_probe, restricted_eval)
from .constraints import (Cardinality, Intersection, Knapsack, MatroidConstraint, PartitionMatroid,
                          PSystem, cardinality_constraint, intersection_constraint,
                          knapsack_constraint, matroid_constraint, partition_matroid)
from .engines import (ENGINES, Engine, constrained_greedy, cost_benefit_greedy, get_engine, greedy,
                      lazy_greedy, random_greedy)
from .partition import Partition, partition_uniform
from .distributed import (BASELINES, GreediConfig, GreediTrace, baseline, exact_two_round, greedi,
                          greedi_decomposable, greedi_general, naive_kround_greedy)
from .verify import BoundReport, brute_force_opt, check_bound, worst_case_instance
from .estimators import GreediActiveSetSelector, GreediExemplarClustering

__version__ = "0.1.0"
