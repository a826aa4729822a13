"""Contraction-sequence search for tensor networks."""

from .deterministic import (GreedyConfig, OptimizerResult, SearchTooLarge,
                            exhaustive_search, greedy_search)
from .generators import (ErdosRenyiSpec, SquareSpec, erdos_renyi, load_network,
                         save_network, square_lattice, three_tensor_example)
from .network import (Contractor, EvalBudget, InvalidSequence, NetworkError, StepRecord,
                      TensorNetwork, contract_step, decode_keys, evaluate_sequence,
                      final_state, step_cost, validate_sequence)
from .stochastic import GAConfig, SAConfig, fitness, ga_run, local_search, sa_run

__version__ = "0.1.0"
