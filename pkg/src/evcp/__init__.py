"""Charger placement on grid maps: QUBO annealing, a real-valued GA, and their hybrid."""

from .annealer import AnnealConfig, SampleSet, best_placement, repair, sample
from .genetic import GaConfig, GaHistory, Individual, evolve, init_population
from .hybrid import METHODS, SolveResult, solve
from .instance import GridInstance, InstanceSpec, candidate_sites, generate_instance, load_instance, save_instance
from .qubo import LambdaParams, QuboConfig, QuboMatrix, build_qubo, energy
from .scoring import Placement, ScoreReport, aggregate, run_score
from .tuner import TunerConfig, TuneResult, tune

__version__ = "0.1.0"
