"""Exact arithmetic foundation: prime fields, extensions, polynomials.

Everything here is pure and immutable after construction; no floating
point enters this subpackage.
"""

from .dickson import dickson
from .extension import (
    DEFAULT_EXTENSION_CAP,
    ExtField,
    ExtFieldElem,
    build_field,
    find_irreducible,
    splitting_roots,
)
from .polyexact import (
    CanonicalForm,
    PolyExact,
    Reduction,
    depress_and_normalize,
    reduce_mod_p,
)
from .polymod import (
    PolyModP,
    count_distinct_roots,
    factor_mod_p,
    is_squarefree,
    poly_gcd,
)
from .primefield import MAX_PRIME, PrimeFieldElem, is_prime
from .resultant import (
    critical_value_poly,
    critical_value_poly_mod_p,
    discriminant,
    resultant,
    resultant_mod_p,
)

__all__ = [
    "DEFAULT_EXTENSION_CAP",
    "MAX_PRIME",
    "CanonicalForm",
    "ExtField",
    "ExtFieldElem",
    "PolyExact",
    "PolyModP",
    "PrimeFieldElem",
    "Reduction",
    "build_field",
    "count_distinct_roots",
    "critical_value_poly",
    "critical_value_poly_mod_p",
    "depress_and_normalize",
    "dickson",
    "discriminant",
    "factor_mod_p",
    "find_irreducible",
    "is_prime",
    "is_squarefree",
    "poly_gcd",
    "reduce_mod_p",
    "resultant",
    "resultant_mod_p",
    "splitting_roots",
]
