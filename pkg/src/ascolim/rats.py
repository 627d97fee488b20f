"""Exact rational scalar selection.

``gmpy2``'s C-implemented rationals are used when available (an order of
magnitude faster on hashing and arithmetic); stdlib ``fractions.Fraction``
otherwise.  The two types hash and compare identically and mix freely in
arithmetic, so callers never need to care which one they hold.
"""

from fractions import Fraction

try:
    from gmpy2 import mpq as RAT

    RAT_TYPES = (int, Fraction, type(RAT(0)))
except ImportError:  # pragma: no cover - gmpy2 is normally present
    RAT = Fraction
    RAT_TYPES = (int, Fraction)


def to_rat(value):
    """Coerce an exact scalar to the RAT backend.

    Fractions built from gmpy2 numbers carry mpz internals, which breaks
    gmpy2's Fraction fast path; rebuilding from plain ints avoids that.
    """
    if isinstance(value, Fraction):
        return RAT(int(value.numerator), int(value.denominator))
    return RAT(value)
