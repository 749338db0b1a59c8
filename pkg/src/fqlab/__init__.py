"""fqlab: a finite-field information workbench.

Exact rate bounds for sum-product functional source coding, syndrome
coding simulations, function decomposability analysis, and entropy
minimization / capacity search for two-state deterministic channels.
"""

from ._kernels import backend as kernel_backend
from .analysis import (DecompositionResult, DiscreteLog, OpProperties,
                       ResidualResult, SectionPartition, decompose,
                       discrete_log_table, g_invertible_in_first, op_properties,
                       residual_dependence, section_classes)
from .channel import (GPDesign, GPSearchResult, MinEntropySearchResult,
                      EntropySandwichReport, TwoStateChannel, additive_entropy,
                      capacity_from_entropy, gp_objective, gp_search,
                      min_entropy_anneal, min_entropy_exhaustive,
                      quadratic_entropy, entropy_sandwich_check)
from .codec import (LinearCode, SimOutcome, coset_decode, decode_table, gf_rank,
                    km_simulate, km_sum_product_centralized,
                    km_sum_product_decentralized, random_parity, syndrome)
from .errors import BudgetError, ConfigError, FieldMismatchError, FqError, InvariantError
from .field import FieldElement, FieldSpec, smallest_generator
from .prob import (JointPmf, Pmf, conditional_entropy, entropy,
                   mutual_information, product_extension, pushforward)
from .source import (ConfusabilityGraph, FunctionalInstance, LineCheckReport,
                     SumProductSource, build_instance, confusability_graph,
                     line_intersection_check, random_source, rate_bounds, rstar)
from .tables import TableFunction, add2, mul2, mul2_nonzero, product3_nonzero, sum3, sum_product

__version__ = "0.1.0"
