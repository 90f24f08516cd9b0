"""expsum-lab: complete exponential sums with polynomial phases.

Library and CLI for computing normalized complete exponential sums over
squarefree moduli, classifying the genericity of the phase polynomial
(Morse / Sidon-Morse / symmetric / indecomposable / Dickson-equivalent),
and checking empirical moment statistics against exact counting oracles
and compact-group reference moments.
"""

from .field_poly import PolyExact, PolyModP, dickson, reduce_mod_p
from .charsums import (
    SumTable,
    ValueDist,
    direct_sum_modq,
    sum_single,
    sum_table,
    table_for_prime,
    tables_for_primes,
    twisted_extend,
    value_distribution,
)
from .genericity import GenericityReport, classify
from .moments import (
    cross_moment,
    dichotomy_scan,
    estimate_kappa,
    fourth_moment_oracle,
    prime_moment,
    second_moment_oracle,
    shao_partial_sum,
    sweep_q,
)
from .rmt import GroupSpec, haar_sample, mc_trace_moment, reference_moment

__version__ = "0.1.0"

__all__ = [
    "GenericityReport",
    "GroupSpec",
    "PolyExact",
    "PolyModP",
    "SumTable",
    "ValueDist",
    "classify",
    "cross_moment",
    "dickson",
    "dichotomy_scan",
    "direct_sum_modq",
    "estimate_kappa",
    "fourth_moment_oracle",
    "haar_sample",
    "mc_trace_moment",
    "prime_moment",
    "reduce_mod_p",
    "reference_moment",
    "second_moment_oracle",
    "shao_partial_sum",
    "sum_single",
    "sum_table",
    "sweep_q",
    "table_for_prime",
    "tables_for_primes",
    "twisted_extend",
    "value_distribution",
]
