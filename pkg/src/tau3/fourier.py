"""Certified evaluation of Fourier transforms of symmetric measures.

For a symmetric probability measure the transform is real:

    FT(t) = sum_a w_a * cos(2*pi*a*t)          (atomic part)
          * / +  prod_k cos(2*pi*c_k*t)        (infinite two-point part)

The interesting arguments have the shape t = lam * base**e with e as large
as 720! worth of digits, so arguments are reduced without ever materializing
the huge powers: fractional parts come from modular exponentiation, and
magnitudes of tiny products are kept in mantissa/exponent form.

Infinite products are split into an exactly evaluated head and a certified
tail.  The tail uses cos(2*pi*x) >= 1 - 49*x**2 (certified on [0, omega] by
the intervals module) and is accumulated in log space with directed
rounding; the upper bound of a tail is always 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import (NotPointwiseEvaluable, SymmetryViolation,
                     TailNotCertified, UnsupportedArgument)
from .intervals import (IntervalValue, cos2pi, exp_neg, log1m, precision_bits,
                        quadratic_cos_threshold)
from .measures import (EXPLICIT, FACTORIAL, GEOMETRIC, CoeffTerm,
                       CoefficientSequence, MeasureExpr, normalize)

#: beyond this many bits, powers of the base are never expanded to integers
MATERIALIZE_BITS = 1 << 15

#: default certified tail width target and head-length cap
TAIL_WIDTH_TARGET = Fraction(1, 10 ** 30)
TAIL_CUTOFF_CAP = 80


@dataclass(frozen=True)
class ExactRational:
    """Argument t given as an exact rational."""

    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))

    def describe(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class ScaledPower:
    """Argument t = scale * base**exponent; the exponent may be huge."""

    scale: Fraction
    base: int
    exponent: int

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))
        if self.scale <= 0:
            raise ValueError("scaled-power arguments need a positive scale")
        if self.base < 2 or self.exponent < 0:
            raise ValueError("need base >= 2 and non-negative exponent")

    def describe(self) -> str:
        if self.scale == 1:
            return f"{self.base}^{self.exponent}"
        return f"({self.scale})*{self.base}^{self.exponent}"


ArgumentSpec = Union[ExactRational, ScaledPower]


def as_argument(t) -> ArgumentSpec:
    if isinstance(t, (ExactRational, ScaledPower)):
        return t
    return ExactRational(Fraction(t))


@dataclass(frozen=True)
class ReducedExact:
    """Fractional part of |c*t|, exactly.

    ``is_value`` is set when the product itself lies in [0, 1), i.e. the
    fractional part is the whole value; magnitude-decay arguments are only
    valid in that case.
    """

    frac: Fraction
    is_value: bool = False

    def dist_to_int(self) -> Fraction:
        return min(self.frac, 1 - self.frac)


@dataclass(frozen=True)
class ReducedSmall:
    """|c*t| = mantissa * base**(-neg_exp), held unexpanded.

    The represented value is exact, but the denominator is too large to be
    worth constructing; only magnitude bounds are ever taken from it.
    """

    mantissa: Fraction
    base: int
    neg_exp: int

    def fits(self, max_bits: int = MATERIALIZE_BITS) -> bool:
        return (self.neg_exp * self.base.bit_length()
                + self.mantissa.denominator.bit_length() <= max_bits)

    def as_fraction(self) -> Fraction:
        return self.mantissa / Fraction(self.base) ** self.neg_exp

    def log2_upper(self) -> Fraction:
        """Certified upper bound on log2 of the represented value."""
        m = self.mantissa
        m_log2_hi = m.numerator.bit_length() - m.denominator.bit_length() + 1
        return m_log2_hi - self.neg_exp * _log2_lower(self.base)

    def dyadic_upper(self) -> Fraction:
        """A power of two certainly >= the represented value."""
        e = self.log2_upper()
        e_int = e.numerator // e.denominator + 1
        return Fraction(2) ** e_int

    def bound_below(self, threshold: Fraction) -> bool:
        """True if the value is certainly <= threshold (cheap, conservative)."""
        if threshold <= 0:
            return False
        return self.dyadic_upper() <= threshold


Reduced = Union[ReducedExact, ReducedSmall]

_LOG2_LOWER_CACHE: dict[int, Fraction] = {}


def _log2_lower(base: int) -> Fraction:
    """Rational lower bound on log2(base), certified by integer comparison."""
    cached = _LOG2_LOWER_CACHE.get(base)
    if cached is not None:
        return cached
    if base & (base - 1) == 0:
        out = Fraction(base.bit_length() - 1)
    else:
        # best p/48: log2(base) >= p/48 iff base**48 >= 2**p
        b48 = base ** 48
        p = b48.bit_length() - 1
        assert b48 >= 1 << p
        out = Fraction(p, 48)
    _LOG2_LOWER_CACHE[base] = out
    return out


def _materializable(base: int, exponent: int, limit: int = MATERIALIZE_BITS) -> bool:
    return exponent * (base.bit_length()) <= limit


def _frac_power(m: Fraction, base: int, exponent: int) -> Fraction:
    """Fractional part of m * base**exponent via modular exponentiation."""
    p, q = m.numerator, m.denominator
    return Fraction((p * pow(base, exponent, q)) % q, q)


def arg_reduce(c, t: ArgumentSpec) -> Reduced:
    """Reduce |c * t| modulo 1 without expanding huge powers.

    ``c`` is a CoeffTerm (mantissa * base**-e) or a plain rational.  Returns
    the exact fractional part whenever the product has a representable
    denominator, otherwise a mantissa/exponent magnitude bound.  Mixed bases
    are supported only while one side stays representable.
    """
    if not isinstance(c, CoeffTerm):
        c = CoeffTerm(Fraction(c))
    t = as_argument(t)
    if isinstance(t, ExactRational):
        m = c.mantissa * abs(t.value)
        if c.base is None or c.neg_exp == 0:
            return ReducedExact(m % 1, is_value=m < 1)
        if _materializable(c.base, c.neg_exp):
            v = m / Fraction(c.base) ** c.neg_exp
            return ReducedExact(v % 1, is_value=v < 1)
        return ReducedSmall(m, c.base, c.neg_exp)

    m = c.mantissa * t.scale
    if c.base is None or c.neg_exp == 0:
        # plain rational coefficient against a power argument
        if t.exponent == 0:
            return ReducedExact(m % 1, is_value=m < 1)
        return ReducedExact(_frac_power(m, t.base, t.exponent))
    if c.base == t.base:
        d = t.exponent - c.neg_exp
        if d == 0:
            return ReducedExact(m % 1, is_value=m < 1)
        if d > 0:
            return ReducedExact(_frac_power(m, t.base, d))
        # negative combined exponent: never build the huge denominator here;
        # consumers materialize via fits() when the value is worth having
        return ReducedSmall(m, c.base, -d)
    if _materializable(c.base, c.neg_exp):
        folded = m / Fraction(c.base) ** c.neg_exp
        if t.exponent == 0:
            return ReducedExact(folded % 1, is_value=folded < 1)
        return ReducedExact(_frac_power(folded, t.base, t.exponent))
    raise UnsupportedArgument(
        f"no common rational form for base {c.base} coefficient against "
        f"base {t.base} argument")


def _cos_of_reduced(r: Reduced, bits: int) -> IntervalValue:
    if isinstance(r, ReducedExact):
        return cos2pi(r.frac, bits)
    # small positive magnitude x <= v: cos(2*pi*x) lies in [cos(2*pi*v), 1]
    v = r.as_fraction() if r.fits() else r.dyadic_upper()
    if v <= Fraction(1, 2):
        return IntervalValue(cos2pi(v, bits).lo, Fraction(1))
    raise TailNotCertified(
        "unexpanded argument too large to bound the cosine near 1")


# ---------------------------------------------------------------------------
# Tail bounds
# ---------------------------------------------------------------------------

def _structural_decay(seq: CoefficientSequence, t: ArgumentSpec) -> bool:
    """True when successive reduced magnitudes certainly shrink by >= base.

    Holds for the infinite kinds once the combined exponent is negative:
    consecutive exponents drop by at least 1 (by k*k! for the factorial
    kind), so magnitudes decay at least geometrically with ratio 1/base.
    """
    if seq.kind not in (FACTORIAL, GEOMETRIC):
        return False
    t = as_argument(t)
    if isinstance(t, ExactRational):
        return True
    return t.base == seq.base or _materializable(t.base, t.exponent)


def _tail_term_bound(seq: CoefficientSequence, k: int, t: ArgumentSpec
                     ) -> tuple[Optional[Fraction], ReducedSmall | None, bool]:
    """Distance-to-integer bound for factor k.

    Returns (rational bound, unexpanded bound, value_flag).  The flag marks
    bounds on the argument *value* itself (not merely its distance to the
    nearest integer); only those license the geometric remainder estimate,
    because |c_{k+j} * t| = |c_k * t| / base**(...) holds for values, not
    for fractional parts.
    """
    r = arg_reduce(seq.term(k), t)
    if isinstance(r, ReducedSmall):
        return None, r, True
    d = r.dist_to_int()
    return d, None, r.is_value and r.frac == d


def tail_bound(seq: CoefficientSequence, cutoff: int, t,
               bits: Optional[int] = None) -> IntervalValue:
    """Certified enclosure of prod_{k > cutoff} cos(2*pi*c_k*t).

    Every tail argument must reduce below the certified quadratic-bound
    threshold omega; then log prod >= sum log(1 - 49*x_k**2), accumulated
    with directed rounding, and the upper bound is 1.  Raises
    TailNotCertified when the arguments are not eventually small.
    """
    bits = bits or precision_bits()
    t = as_argument(t)
    if isinstance(t, ExactRational) and t.value == 0:
        return IntervalValue.point(1)

    if seq.kind == EXPLICIT:
        # finite product: evaluate the remaining factors directly
        out = IntervalValue.point(1)
        for k in range(cutoff + 1, len(seq.values) + 1):
            out = (out * _cos_of_reduced(arg_reduce(seq.term(k), t), bits))
            out = out.clamp(-1, 1).round_out(bits)
        return out

    if not _structural_decay(seq, t):
        raise TailNotCertified(
            "tail decay is only certified for the structured families")

    omega = quadratic_cos_threshold()
    coeff = 49
    base = seq.base
    log_lo = Fraction(0)
    ulp = Fraction(1, 1 << bits)
    y_close = min(Fraction(1, 1 << (bits // 2)), TAIL_WIDTH_TARGET / 16)
    geom = Fraction(base * base, base * base - 1)
    slack_terms = 0
    closed = False
    k = cutoff
    guard = 64 + bits // 2
    while not closed:
        k += 1
        if k - cutoff > guard:
            raise TailNotCertified(
                f"tail arguments after index {cutoff} do not certifiably "
                f"decay within {guard} consecutive factors")
        d, small, is_value = _tail_term_bound(seq, k, t)
        if small is not None:
            # an unexpanded reduction bounds the value itself
            d = small.as_fraction() if small.fits() else small.dyadic_upper()
            is_value = True
            if d > omega / 2:
                raise TailNotCertified(
                    f"cannot certify factor {k} below threshold {omega}/2")
        elif d > omega:
            raise TailNotCertified(
                f"factor {k} reduces to {d}, above threshold {omega}")
        if d != 0:
            y = coeff * d * d
            if is_value and d <= omega / 2 and y <= y_close:
                # close: values beyond k shrink by >= 1/base per step, so
                # the remaining quadratic deficits sum below y * geom
                total = y * geom
                if total > ulp:
                    log_lo -= 2 * total
                slack_terms += 2
                closed = True
                break
            if y <= ulp:
                log_lo -= 2 * y        # log(1-y) >= -2y for 0 <= y <= 1/2
            else:
                log_lo += log1m(y, bits).lo
    log_lo -= Fraction(4 * (slack_terms + 4), 1 << bits)

    lo = exp_neg(-log_lo, bits).lo
    return IntervalValue(min(lo, Fraction(1)), Fraction(1))


def choose_cutoff(seq: CoefficientSequence, t,
                  width_target: Fraction = TAIL_WIDTH_TARGET,
                  cap: int = TAIL_CUTOFF_CAP) -> int:
    """Smallest head length whose certified tail width is below the target.

    Returns ``cap`` if the target is never reached within it; the result is
    then still sound, only wider.  Raises TailNotCertified when no tail
    start at all exists within the cap.
    """
    t = as_argument(t)
    if seq.kind == EXPLICIT:
        return len(seq.values)
    if isinstance(t, ExactRational) and t.value == 0:
        return 1
    omega = quadratic_cos_threshold()
    first_small = None
    k = 0
    while k < cap:
        k += 1
        d, small, is_value = _tail_term_bound(seq, k, t)
        if small is not None:
            d = small.as_fraction() if small.fits() else small.dyadic_upper()
            is_value = True
        if d > omega:
            first_small = None
            continue
        if first_small is None:
            first_small = k
        # conclude only from value-form terms: those certify the decay of
        # everything beyond; estimated remaining width ~ 200 * (d/base)^2
        if is_value and 200 * d * d <= width_target * seq.base * seq.base:
            return max(first_small, k)
    if first_small is None:
        raise TailNotCertified(
            f"no certified tail start within the first {cap} factors")
    return cap


# ---------------------------------------------------------------------------
# Pointwise transform
# ---------------------------------------------------------------------------

def _atom_part(expr: MeasureExpr, t: ArgumentSpec, bits: int) -> IntervalValue:
    table = dict(expr.atoms)
    for p, w in expr.atoms:
        if table.get(-p) != w:
            raise SymmetryViolation(
                f"pointwise evaluation needs weight-symmetric atoms; "
                f"weights at {p} and {-p} differ")
    total = IntervalValue.point(0)
    for p, w in expr.atoms:
        if p == 0:
            total = total + IntervalValue.point(w)
            continue
        r = arg_reduce(CoeffTerm(abs(p)), t)
        total = total + _cos_of_reduced(r, bits).scale(w)
    return total


def _bernoulli_part(seq: CoefficientSequence, t: ArgumentSpec,
                    tail_cutoff: Optional[int], bits: int) -> IntervalValue:
    cutoff = tail_cutoff if tail_cutoff is not None else choose_cutoff(seq, t)
    if seq.kind == EXPLICIT:
        cutoff = min(cutoff, len(seq.values))
    out = IntervalValue.point(1)
    for k in range(1, cutoff + 1):
        out = (out * _cos_of_reduced(arg_reduce(seq.term(k), t), bits))
        out = out.clamp(-1, 1)
        if not out.exact:
            out = out.round_out(bits)
    tail = tail_bound(seq, cutoff, t, bits)
    out = out * tail
    return out.clamp(-1, 1) if not out.exact else out


def ft_point(expr: MeasureExpr, t, tail_cutoff: Optional[int] = None,
             bits: Optional[int] = None) -> IntervalValue:
    """Certified enclosure of the Fourier transform of ``expr`` at ``t``.

    The measure must have finite mass (no Lebesgue component).  For
    convolution forms the enclosure is the product of the factor
    enclosures, each clamped to its own mass bound.
    """
    bits = bits or precision_bits()
    t = as_argument(t)
    expr = normalize(expr)
    if expr.lebesgue:
        raise NotPointwiseEvaluable(
            "the Lebesgue component has no pointwise transform")
    if isinstance(t, ExactRational) and t.value == 0:
        return IntervalValue.point(expr.mass())
    if expr.is_convolution:
        if any(f.lebesgue for f in expr.factors):
            raise NotPointwiseEvaluable(
                "a convolution factor carries the Lebesgue component")
        out = IntervalValue.point(1)
        for f in expr.factors:
            m = f.mass()
            out = out * ft_point(f, t, tail_cutoff, bits).clamp(-m, m)
            if not out.exact:
                out = out.round_out(bits)
        return out
    out = _atom_part(expr, t, bits)
    if expr.bernoulli is not None:
        out = out + _bernoulli_part(expr.bernoulli, t, tail_cutoff, bits)
    mass = expr.mass()
    out = out.clamp(-mass, mass)
    return out if out.exact else out.round_out(bits)
