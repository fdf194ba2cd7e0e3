"""Data cleaning with a learned generative model and a noisy-channel error model."""

from ._kernels import BACKEND
from .bayes_net import BayesNet, NetworkStructure, bic_score, learn_bayes_net, learn_cpts, learn_structure
from .cfd import CFDRule, count_violations, mine_cfds
from .cleaner import Cleaner, CleanerConfig, Repair, clean_relation, clean_tuple, generate_candidates
from .error_model import ErrorModelParams, attribute_error_probability, edit_distance, f_ds, f_ed
from .evaluation import CleaningMetrics, SweepResult, score, sweep_beta, sweep_scale
from .noise import GroundTruth, NoiseSpec, inject, replay
from .relation import DomainIndex, Relation, Schema, build_domain_index, load_csv, write_csv

__version__ = "0.1.0"
