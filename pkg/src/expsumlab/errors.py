"""Exception types shared across the package.

Every error that a caller is expected to catch subclasses ExpsumError, so
the CLI can map failures onto its exit-code contract in one place.
"""


class ExpsumError(Exception):
    """Base class for all package-specific errors."""


class BadReduction(ExpsumError):
    """Reduction mod p hit a coefficient denominator divisible by p."""


class SmallCharacteristic(ExpsumError):
    """Characteristic too small for a squarefreeness test (p <= deg f)."""


class SmallPrime(ExpsumError):
    """Prime below the threshold required by a genericity test."""


class BadCharacteristic(ExpsumError):
    """p divides deg(f) - 1, so the critical shift is undefined."""


class DegenerateDerivative(ExpsumError):
    """deg f' < deg f - 1, the critical-value polynomial degenerates."""


class ExtensionTooLarge(ExpsumError):
    """Splitting field degree exceeds the configured cap."""


class DuplicateValues(ExpsumError):
    """A Sidon test was handed a multiset with repeated entries."""


class NoGoodPrime(ExpsumError):
    """Every candidate certificate prime failed the screening."""


class PrimeTooLarge(ExpsumError):
    """Requested table exceeds the per-table prime cap."""


class MissingTable(ExpsumError):
    """Twisted extension needs a per-prime table that was not supplied."""


class NonSquarefree(ExpsumError):
    """Strict-mode twisted extension rejected a non-squarefree modulus."""


class NotAMeasure(ExpsumError):
    """Input vector is not a probability measure (negativity or bad mass)."""


class InsufficientSamples(ExpsumError):
    """Too few sample primes for a stable factor-count estimate."""


class CapExceeded(ExpsumError):
    """A sweep or table request exceeded a configured resource cap."""


class CacheCorrupt(ExpsumError):
    """A cache entry failed its checksum and was evicted."""


class VerificationMismatch(ExpsumError):
    """A self-test comparison exceeded its tolerance."""
