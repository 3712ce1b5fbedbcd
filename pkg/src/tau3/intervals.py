"""Certified interval arithmetic over exact rational endpoints.

Every value of interest is carried as an ``IntervalValue`` with ``Fraction``
endpoints.  Ring operations (+, -, *) on rationals are exact, so no rounding
happens there; width is introduced only by the transcendental kernels below,
which evaluate in fixed-point integer arithmetic with directed rounding:

    cos2pi(q)            enclosure of cos(2*pi*q) for rational q
    cos2pi_interval(a,b) enclosure of {cos(2*pi*x) : a <= x <= b}
    log1m(y)             enclosure of log(1 - y), 0 <= y < 1
    exp_neg(s)           enclosure of exp(-s), s >= 0

Soundness contract: the true value always lies inside the returned interval.
The kernels use alternating Taylor series whose partial sums bracket the
limit, plus one unit-in-the-last-place of slack per arithmetic step, so the
contract holds for every rounding of the fixed-point operations.

cos2pi is exact (zero width) at the rational points where the cosine of a
rational multiple of 2*pi is itself rational; by Niven's theorem these are
exactly the fractions with denominator 1, 2, 3, 4 or 6.

The working precision (bits of fixed-point scale) comes from the
``TAU3_PRECISION`` environment variable: one of the profile names ``fast``,
``default``, ``high``, or an explicit bit count.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Union[Fraction, int]

PRECISION_PROFILES = {"fast": 128, "default": 256, "high": 512}

# 2*pi to 125 decimal digits; enough for 384-bit enclosures.
_TWO_PI_DIGITS = (
    "6."
    "2831853071795864769252867665590057683943387987502116419498891846"
    "156328125724179972560696506842341359642961730265646132941877"
)


def precision_bits() -> int:
    """Working precision in bits, from TAU3_PRECISION (profile name or int)."""
    raw = os.environ.get("TAU3_PRECISION", "default").strip().lower()
    if raw in PRECISION_PROFILES:
        return PRECISION_PROFILES[raw]
    try:
        bits = int(raw)
    except ValueError:
        return PRECISION_PROFILES["default"]
    return max(64, min(bits, 4096))


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _floor_scaled(x: Fraction, s: int) -> int:
    return (x.numerator << s) // x.denominator


def _ceil_scaled(x: Fraction, s: int) -> int:
    return _ceil_div(x.numerator << s, x.denominator)


def _two_pi_bounds(s: int) -> tuple[int, int]:
    ip, fp = _TWO_PI_DIGITS.split(".")
    num = int(ip + fp)
    den = 10 ** len(fp)
    lo = (num << s) // den
    return lo, _ceil_div((num + 1) << s, den)


@dataclass(frozen=True)
class IntervalValue:
    """Closed interval [lo, hi] guaranteed to contain the true value.

    ``exact`` marks zero-width intervals whose endpoints are the value
    itself (not merely a tight enclosure).
    """

    lo: Fraction
    hi: Fraction
    exact: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"inverted interval [{self.lo}, {self.hi}]")
        if self.exact and self.lo != self.hi:
            raise ValueError("exact interval must have equal endpoints")

    @staticmethod
    def point(x: Rational) -> "IntervalValue":
        x = Fraction(x)
        return IntervalValue(x, x, exact=True)

    @staticmethod
    def bounds(lo: Rational, hi: Rational) -> "IntervalValue":
        return IntervalValue(Fraction(lo), Fraction(hi))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x: Rational) -> bool:
        return self.lo <= x <= self.hi

    def intersects(self, other: "IntervalValue") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersection(self, other: "IntervalValue") -> "IntervalValue":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise ValueError("empty intersection")
        return IntervalValue(lo, hi, exact=self.exact and other.exact)

    def mag_hi(self) -> Fraction:
        """Upper bound on |value|."""
        return max(abs(self.lo), abs(self.hi))

    def __add__(self, other):
        other = _coerce(other)
        return IntervalValue(self.lo + other.lo, self.hi + other.hi,
                             exact=self.exact and other.exact)

    __radd__ = __add__

    def __neg__(self):
        return IntervalValue(-self.hi, -self.lo, exact=self.exact)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        cands = (self.lo * other.lo, self.lo * other.hi,
                 self.hi * other.lo, self.hi * other.hi)
        return IntervalValue(min(cands), max(cands),
                             exact=self.exact and other.exact)

    __rmul__ = __mul__

    def scale(self, c: Rational) -> "IntervalValue":
        c = Fraction(c)
        if c >= 0:
            return IntervalValue(self.lo * c, self.hi * c, exact=self.exact)
        return IntervalValue(self.hi * c, self.lo * c, exact=self.exact)

    def clamp(self, lo: Rational, hi: Rational) -> "IntervalValue":
        """Intersect with [lo, hi], which must be a known outer bound."""
        return IntervalValue(max(self.lo, Fraction(lo)),
                             min(self.hi, Fraction(hi)), exact=self.exact)

    def round_out(self, bits: int) -> "IntervalValue":
        """Round endpoints outward onto the dyadic grid 2**-bits.

        Keeps denominators bounded after long products; exactness is
        preserved only for endpoints already on the grid.
        """
        lo = Fraction(_floor_scaled(self.lo, bits), 1 << bits)
        hi = Fraction(_ceil_scaled(self.hi, bits), 1 << bits)
        return IntervalValue(lo, hi, exact=self.exact and lo == hi)

    def __repr__(self):
        if self.exact:
            return f"IntervalValue({self.lo!s}, exact)"
        return f"IntervalValue([{float(self.lo)!r}, {float(self.hi)!r}])"


def _coerce(x) -> IntervalValue:
    if isinstance(x, IntervalValue):
        return x
    return IntervalValue.point(x)


ONE = IntervalValue.point(1)
ZERO = IntervalValue.point(0)

# cos(2*pi*q) is rational exactly at these residues of q mod 1.
_EXACT_COS = {
    Fraction(0): Fraction(1),
    Fraction(1, 2): Fraction(-1),
    Fraction(1, 4): Fraction(0),
    Fraction(3, 4): Fraction(0),
    Fraction(1, 3): Fraction(-1, 2),
    Fraction(2, 3): Fraction(-1, 2),
    Fraction(1, 6): Fraction(1, 2),
    Fraction(5, 6): Fraction(1, 2),
}


def _cos_series(u: int, s: int) -> tuple[int, int]:
    """Bracket cos(u/2**s) for 0 <= u/2**s <= 1.6, fixed-point at scale s.

    Alternating Taylor series; terms decrease from the second one on, so the
    remainder after truncation is bounded by the first omitted term.  Two
    ulps of slack absorb the directed-rounding error of each accumulation.
    """
    one = 1 << s
    uu = u * u
    u2_lo, u2_hi = uu >> s, _ceil_div(uu, one)
    t_lo, t_hi = one, one
    s_lo, s_hi = one, one
    sign = -1
    j = 1
    while True:
        d = (2 * j - 1) * (2 * j) << s
        t_lo, t_hi = (t_lo * u2_lo) // d, _ceil_div(t_hi * u2_hi, d)
        if sign < 0:
            s_lo, s_hi = s_lo - t_hi, s_hi - t_lo
        else:
            s_lo, s_hi = s_lo + t_lo, s_hi + t_hi
        if t_hi <= 2 and j >= 2:
            return s_lo - t_hi - 2, s_hi + t_hi + 2
        sign = -sign
        j += 1


def _cos2pi_reduced(x: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Enclose cos(2*pi*x) for x in [0, 1/4]; cos is decreasing there."""
    tp_lo, tp_hi = _two_pi_bounds(bits)
    u_lo = (x.numerator * tp_lo) // x.denominator
    u_hi = _ceil_div(x.numerator * tp_hi, x.denominator)
    lo, _ = _cos_series(u_hi, bits)
    _, hi = _cos_series(u_lo, bits)
    den = 1 << bits
    return Fraction(max(lo, -den), den), Fraction(min(hi, den), den)


def cos2pi(q: Rational, bits: int | None = None) -> IntervalValue:
    """Certified enclosure of cos(2*pi*q) for rational q."""
    bits = bits or precision_bits()
    q = Fraction(q) % 1
    exact = _EXACT_COS.get(q)
    if exact is not None:
        return IntervalValue.point(exact)
    neg = False
    if q > Fraction(1, 2):
        q = 1 - q
    if q > Fraction(1, 4):
        q = Fraction(1, 2) - q
        neg = True
    lo, hi = _cos2pi_reduced(q, bits)
    if neg:
        lo, hi = -hi, -lo
    return IntervalValue(lo, hi)


def cos2pi_interval(a: Rational, b: Rational,
                    bits: int | None = None) -> IntervalValue:
    """Enclosure of the range of cos(2*pi*x) over the interval [a, b]."""
    bits = bits or precision_bits()
    a, b = Fraction(a), Fraction(b)
    if a > b:
        raise ValueError("interval endpoints out of order")
    if b - a >= 1:
        return IntervalValue(Fraction(-1), Fraction(1))
    shift = a - (a % 1)
    a, b = a - shift, b - shift          # a in [0, 1), b < 2
    va, vb = cos2pi(a, bits), cos2pi(b, bits)
    lo, hi = min(va.lo, vb.lo), max(va.hi, vb.hi)
    # interior extrema: cos(2*pi*x) hits +1 at integers, -1 at half-integers
    for m in (Fraction(0), Fraction(1)):
        if a <= m <= b:
            hi = Fraction(1)
    for m in (Fraction(1, 2), Fraction(3, 2)):
        if a <= m <= b:
            lo = Fraction(-1)
    return IntervalValue(lo, hi)


LOG1M_DOMAIN_MAX = Fraction(15, 16)


def log1m(y: Rational, bits: int | None = None) -> IntervalValue:
    """Certified enclosure of log(1 - y) for rational 0 <= y <= 15/16.

    Series -sum_{j>=1} y^j / j with the tail after J terms bounded by
    y^(J+1) / ((J+1)(1-y)).
    """
    bits = bits or precision_bits()
    y = Fraction(y)
    if y == 0:
        return IntervalValue.point(0)
    if not 0 < y <= LOG1M_DOMAIN_MAX:
        raise ValueError(f"log1m argument {y} outside [0, {LOG1M_DOMAIN_MAX}]")
    one = 1 << bits
    y_lo, y_hi = _floor_scaled(y, bits), _ceil_scaled(y, bits)
    t_lo, t_hi = y_lo, y_hi
    s_lo, s_hi = y_lo, y_hi
    j = 1
    # ceil rounding has a fixed point near t ~ 1/(1-y) <= 16 ulp; exit
    # above it, the remainder bound absorbs what is left
    while t_hi > 64:
        j += 1
        t_lo, t_hi = (t_lo * y_lo) >> bits, _ceil_div(t_hi * y_hi, one)
        s_lo, s_hi = s_lo + t_lo // j, s_hi + _ceil_div(t_hi, j)
    # remainder of the omitted tail, evaluated with the upper endpoint
    rem = _ceil_div(t_hi * y_hi, (one - y_hi) * (j + 1))
    den = 1 << bits
    return IntervalValue(Fraction(-(s_hi + rem + 2 * j + 4), den),
                         Fraction(-s_lo, den))


def exp_neg(s: Rational, bits: int | None = None) -> IntervalValue:
    """Certified enclosure of exp(-s) for rational s >= 0."""
    bits = bits or precision_bits()
    s = Fraction(s)
    if s < 0:
        raise ValueError("exp_neg expects a non-negative argument")
    if s == 0:
        return ONE
    halvings = 0
    while s > Fraction(1, 2):
        s /= 2
        halvings += 1
    one = 1 << bits
    v_lo, v_hi = _floor_scaled(s, bits), _ceil_scaled(s, bits)
    # alternating series for exp(-v), v in (0, 1/2]: terms strictly decrease
    t_lo, t_hi = one, one
    r_lo, r_hi = one, one
    sign = -1
    j = 1
    while True:
        t_lo, t_hi = (t_lo * v_lo) // (j << bits), _ceil_div(t_hi * v_hi, j << bits)
        if sign < 0:
            r_lo, r_hi = r_lo - t_hi, r_hi - t_lo
        else:
            r_lo, r_hi = r_lo + t_lo, r_hi + t_hi
        if t_hi <= 2:
            r_lo, r_hi = r_lo - t_hi - 2, r_hi + t_hi + 2
            break
        sign = -sign
        j += 1
    r_lo = max(r_lo, 0)
    for _ in range(halvings):
        r_lo, r_hi = (r_lo * r_lo) >> bits, _ceil_div(r_hi * r_hi, one)
    den = 1 << bits
    return IntervalValue(Fraction(r_lo, den), Fraction(min(r_hi, den), den))


# ---------------------------------------------------------------------------
# Quadratic lower bound for the cosine near zero.
#
# The tail estimates rely on cos(2*pi*x) >= 1 - 49*x**2 holding on [0, omega].
# We certify it on [0, 1/8] once per process and cache the result.  Two
# complementary arguments cover the range:
#   (a) 1 - cos(u) <= u**2 / 2 for all u (alternating series), hence
#       cos(2*pi*x) >= 1 - 2*pi^2*x^2, and 2*pi^2 < 49 by rational comparison
#       of the embedded 2*pi upper bound; this covers a neighbourhood of 0.
#   (b) direct interval comparison on each subdivision piece away from 0.
# ---------------------------------------------------------------------------

QUADRATIC_COS_COEFF = 49
_OMEGA = Fraction(1, 8)
_omega_certified = False


def _two_pi_sq_half_hi(bits: int) -> Fraction:
    _, tp_hi = _two_pi_bounds(bits)
    tp = Fraction(tp_hi, 1 << bits)
    return tp * tp / 2


def certify_quadratic_cos_bound(omega: Fraction = _OMEGA, pieces: int = 64,
                                bits: int = 128) -> bool:
    """Verify cos(2*pi*x) >= 1 - 49*x**2 on [0, omega] by subdivision.

    Raises ValueError if certification fails (it does not, for omega <= 1/8).
    """
    if not 0 < omega <= Fraction(1, 4):
        raise ValueError("omega must lie in (0, 1/4]")
    dominated = _two_pi_sq_half_hi(bits) <= QUADRATIC_COS_COEFF
    for i in range(pieces):
        a = omega * i / pieces
        b = omega * (i + 1) / pieces
        enclosure = cos2pi_interval(a, b, bits)
        if enclosure.lo >= 1 - QUADRATIC_COS_COEFF * a * a:
            continue
        # pieces touching 0 need the series argument: on [a, b],
        # 1 - cos(2*pi*x) <= (2*pi*x)^2/2 <= 2*pi^2*x^2 <= 49*x^2.
        if not dominated:
            raise ValueError(
                f"cannot certify quadratic cosine bound on [{a}, {b}]")
    return True


def quadratic_cos_threshold() -> Fraction:
    """Largest argument magnitude at which the 1 - 49*x**2 bound is certified."""
    global _omega_certified
    if not _omega_certified:
        certify_quadratic_cos_bound()
        _omega_certified = True
    return _OMEGA
