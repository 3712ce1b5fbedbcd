"""Symbolic symmetric measures on the additive real line.

A ``MeasureExpr`` is either a *sum form* (finite symmetric atom list, an
optional Lebesgue component, an optional infinite two-point-convolution
descriptor) or a *convolution form* (a lazily held multiset of factors).
Everything lives on the additive line: multiplicative statements about the
positive half-line are mapped through the logarithm, so the multiplicative
unit corresponds to an atom at 0.

Points and weights are exact rationals.  All values are immutable and every
operation is a pure function.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Optional

from .errors import BudgetExceeded, SpecFormatError, SymmetryViolation

DEFAULT_ATOM_BUDGET = 4096

FACTORIAL = "factorial"
GEOMETRIC = "geometric"
EXPLICIT = "explicit"


def parse_rational(text) -> Fraction:
    """Parse "p/q" / integer / decimal strings into an exact Fraction."""
    if isinstance(text, bool):
        raise SpecFormatError(f"expected a rational, got boolean {text}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if isinstance(text, float):
        raise SpecFormatError(
            f"float {text!r} rejected: rationals must be given as 'p/q' strings")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecFormatError(f"cannot parse rational {text!r}: {exc}") from None


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


@dataclass(frozen=True)
class CoeffTerm:
    """One coefficient c_k in mantissa * base**(-neg_exp) form.

    ``base`` is None for plain rationals (explicit lists, already-folded
    terms); then neg_exp is 0 and the value is just the mantissa.
    """

    mantissa: Fraction
    base: Optional[int] = None
    neg_exp: int = 0

    def value(self) -> Fraction:
        if self.base is None or self.neg_exp == 0:
            return self.mantissa
        return self.mantissa / Fraction(self.base) ** self.neg_exp


@dataclass(frozen=True)
class CoefficientSequence:
    """Generator of the coefficients c_k of an infinite two-point convolution.

    kind "factorial": c_k = scale * base**(-k!)
    kind "geometric": c_k = scale * base**(-k)
    kind "explicit":  c_k = scale * values[k-1], finite list

    Coefficients must be strictly positive and strictly decreasing; for the
    infinite kinds with base >= 2 the square-summability needed for the
    limit measure to exist is automatic.
    """

    kind: str
    base: Optional[int] = None
    scale: Fraction = Fraction(1)
    values: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))
        if self.scale <= 0:
            raise ValueError("coefficient scale must be positive")
        if self.kind in (FACTORIAL, GEOMETRIC):
            if self.base is None or self.base < 2:
                raise ValueError(f"{self.kind} sequence needs an integer base >= 2")
            if self.values:
                raise ValueError(f"{self.kind} sequence takes no explicit values")
        elif self.kind == EXPLICIT:
            vals = tuple(Fraction(v) for v in self.values)
            if not vals:
                raise ValueError("explicit sequence must be non-empty")
            if any(v <= 0 for v in vals):
                raise ValueError("explicit coefficients must be positive")
            if any(b >= a for a, b in zip(vals, vals[1:])):
                raise ValueError("explicit coefficients must be strictly decreasing")
            object.__setattr__(self, "values", vals)
            object.__setattr__(self, "base", None)
        else:
            raise ValueError(f"unknown sequence kind {self.kind!r}")

    @property
    def length(self) -> Optional[int]:
        """Number of coefficients, or None for the infinite kinds."""
        return len(self.values) if self.kind == EXPLICIT else None

    def exponent(self, k: int) -> int:
        if self.kind == FACTORIAL:
            return factorial(k)
        if self.kind == GEOMETRIC:
            return k
        raise ValueError("explicit sequences have no exponent form")

    def term(self, k: int) -> CoeffTerm:
        if k < 1:
            raise ValueError("coefficient index starts at 1")
        if self.kind == EXPLICIT:
            if k > len(self.values):
                raise IndexError(f"coefficient index {k} beyond explicit list")
            return CoeffTerm(self.scale * self.values[k - 1])
        return CoeffTerm(self.scale, self.base, self.exponent(k))

    def c(self, k: int) -> Fraction:
        return self.term(k).value()

    def rescaled(self, factor: Fraction) -> "CoefficientSequence":
        return CoefficientSequence(self.kind, self.base, self.scale * factor,
                                   self.values)

    def key(self) -> tuple:
        return (self.kind, self.base, self.scale, self.values)

    def describe(self) -> str:
        if self.kind == EXPLICIT:
            body = ",".join(format_rational(v) for v in self.values)
            head = f"explicit({body})"
        else:
            sym = "k!" if self.kind == FACTORIAL else "k"
            head = f"{self.base}^-{sym}"
        if self.scale != 1:
            return f"{format_rational(self.scale)}*{head}"
        return head


@dataclass(frozen=True)
class AtomList:
    """Finite symmetric atomic measure as a sorted (point, weight) tuple."""

    atoms: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(
            (Fraction(p), Fraction(w)) for p, w in self.atoms))

    @property
    def mass(self) -> Fraction:
        return sum((w for _, w in self.atoms), Fraction(0))

    def points(self) -> tuple[Fraction, ...]:
        return tuple(p for p, _ in self.atoms)

    def is_symmetric(self) -> bool:
        table = dict(self.atoms)
        return all(table.get(-p) == w for p, w in self.atoms)

    def to_measure(self) -> "MeasureExpr":
        return MeasureExpr(atoms=self.atoms)


def _merge_atoms(pairs: Iterable[tuple[Fraction, Fraction]]) -> tuple:
    acc: dict[Fraction, Fraction] = {}
    for p, w in pairs:
        p, w = Fraction(p), Fraction(w)
        if w < 0:
            raise ValueError(f"negative atom weight {w} at {p}")
        acc[p] = acc.get(p, Fraction(0)) + w
    return tuple(sorted((p, w) for p, w in acc.items() if w != 0))


@dataclass(frozen=True)
class MeasureExpr:
    """Symbolic symmetric measure; see module docstring for the two forms."""

    atoms: tuple[tuple[Fraction, Fraction], ...] = ()
    lebesgue: bool = False
    bernoulli: Optional[CoefficientSequence] = None
    factors: tuple["MeasureExpr", ...] = ()
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))
        object.__setattr__(self, "atoms", tuple(
            (Fraction(p), Fraction(w)) for p, w in self.atoms))
        if self.scale <= 0:
            raise ValueError("measure scale must be positive")
        if self.factors and (self.atoms or self.lebesgue or self.bernoulli):
            raise ValueError(
                "convolution form cannot carry direct components; "
                "wrap them as an extra factor instead")

    # -- structure helpers -------------------------------------------------

    @property
    def is_convolution(self) -> bool:
        return bool(self.factors)

    @property
    def is_zero(self) -> bool:
        return (not self.atoms and not self.lebesgue
                and self.bernoulli is None and not self.factors)

    def mass(self) -> Fraction:
        """Total mass; the Lebesgue component makes it infinite (raises)."""
        if self.lebesgue:
            raise ValueError("infinite-mass measure")
        if self.factors:
            out = Fraction(1)
            for f in self.factors:
                out *= f.mass()
            return out
        total = sum((w for _, w in self.atoms), Fraction(0))
        if self.bernoulli is not None:
            total += Fraction(1)
        return total

    def atom_weight_total(self) -> Fraction:
        return sum((w for _, w in self.atoms), Fraction(0))

    def sort_key(self) -> str:
        return self.describe()

    def describe(self) -> str:
        if self.factors:
            return "conv(" + " * ".join(f.describe() for f in self.factors) + ")"
        parts = []
        for p, w in self.atoms:
            parts.append(f"atom({format_rational(p)},{format_rational(w)})")
        if self.lebesgue:
            parts.append("lebesgue")
        if self.bernoulli is not None:
            parts.append(f"bernoulli[{self.bernoulli.describe()}]")
        body = " + ".join(parts) if parts else "zero"
        if self.scale != 1:
            return f"scale({format_rational(self.scale)}; {body})"
        return body

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_atoms(pairs) -> "MeasureExpr":
        return MeasureExpr(atoms=tuple(pairs))

    @staticmethod
    def symmetric_pair(point, weight=Fraction(1, 2)) -> "MeasureExpr":
        p, w = Fraction(point), Fraction(weight)
        if p == 0:
            return MeasureExpr(atoms=((p, 2 * w),))
        return MeasureExpr(atoms=((-p, w), (p, w)))

    @staticmethod
    def lebesgue_measure() -> "MeasureExpr":
        return MeasureExpr(lebesgue=True)

    @staticmethod
    def bernoulli_factorial(base: int = 3, scale=Fraction(1)) -> "MeasureExpr":
        return MeasureExpr(bernoulli=CoefficientSequence(FACTORIAL, base,
                                                         Fraction(scale)))

    @staticmethod
    def bernoulli_geometric(base: int = 3, scale=Fraction(1)) -> "MeasureExpr":
        return MeasureExpr(bernoulli=CoefficientSequence(GEOMETRIC, base,
                                                         Fraction(scale)))

    @staticmethod
    def convolution(factors) -> "MeasureExpr":
        return MeasureExpr(factors=tuple(factors))

    def plus(self, other: "MeasureExpr") -> "MeasureExpr":
        """Sum of two sum-form measures (componentwise)."""
        if self.is_convolution or other.is_convolution:
            raise ValueError("sum of convolution forms is not representable")
        a = normalize(self)
        b = normalize(other)
        if a.bernoulli is not None and b.bernoulli is not None:
            raise ValueError("at most one infinite-convolution summand")
        return normalize(MeasureExpr(atoms=a.atoms + b.atoms,
                                     lebesgue=a.lebesgue or b.lebesgue,
                                     bernoulli=a.bernoulli or b.bernoulli))


def normalize(expr: MeasureExpr,
              atom_budget: int = DEFAULT_ATOM_BUDGET) -> MeasureExpr:
    """Canonical form: duplicates merged, scale pushed inward, factors sorted.

    Idempotent; class-equal expressions built from the same components in a
    different order come out byte-identical.  Raises SymmetryViolation if
    the atom set is not closed under negation with matching weights.
    """
    if expr.is_convolution:
        factors = []
        for f in expr.factors:
            g = normalize(scale_measure(f, expr.scale), atom_budget)
            if g.is_convolution:
                factors.extend(g.factors)     # flatten nested convolutions
            else:
                factors.append(g)
        factors = [f for f in factors
                   if not (f.atoms == ((Fraction(0), Fraction(1)),)
                           and not f.lebesgue and f.bernoulli is None)]
        if not factors:
            return MeasureExpr(atoms=((Fraction(0), Fraction(1)),))
        if len(factors) == 1:
            return factors[0]
        if all(f.bernoulli is None and not f.lebesgue for f in factors):
            total = 1
            for f in factors:
                total *= max(len(f.atoms), 1)
            if total <= atom_budget:
                atoms = ((Fraction(0), Fraction(1)),)
                for f in factors:
                    atoms = _convolve_atom_tuples(atoms, f.atoms)
                return normalize(MeasureExpr(atoms=atoms), atom_budget)
        return MeasureExpr(factors=tuple(sorted(factors,
                                                key=MeasureExpr.sort_key)))

    s = expr.scale
    atoms = _merge_atoms((p / s, w) for p, w in expr.atoms)
    table = dict(atoms)
    for p, _ in atoms:
        # the support must be closed under negation; merged weights may
        # differ transiently (duplicate summands), which pointwise
        # evaluation rejects separately
        if -p not in table:
            raise SymmetryViolation(f"atom at {p} lacks a mirror at {-p}")
    bern = expr.bernoulli.rescaled(Fraction(1) / s) if expr.bernoulli else None
    return MeasureExpr(atoms=atoms, lebesgue=expr.lebesgue, bernoulli=bern)


def scale_measure(expr: MeasureExpr, s) -> MeasureExpr:
    """Rescale: the result assigns to a set X the mass of s*X.

    Atoms at a move to a/s; coefficient sequences divide their scale by s;
    the Lebesgue component is invariant as a class.
    """
    s = Fraction(s)
    if s <= 0:
        raise ValueError("scaling factor must be positive")
    if s == 1:
        return expr
    return MeasureExpr(atoms=expr.atoms, lebesgue=expr.lebesgue,
                       bernoulli=expr.bernoulli, factors=expr.factors,
                       scale=expr.scale * s)


def _convolve_atom_tuples(a, b):
    return _merge_atoms(((pa + pb, wa * wb) for pa, wa in a for pb, wb in b))


def convolve_atoms(a: AtomList, b: AtomList) -> AtomList:
    """Exact convolution of two finite atomic measures."""
    return AtomList(_convolve_atom_tuples(a.atoms, b.atoms))


def bernoulli_partial(seq: CoefficientSequence, n: int,
                      atom_budget: int = DEFAULT_ATOM_BUDGET) -> AtomList:
    """Atoms of the n-fold partial convolution of the two-point factors.

    Expands prod_{k<=n} (delta at +c_k and -c_k, weight 1/2 each); duplicate
    sums are merged.  Total mass is exactly 1 and the support is symmetric.
    """
    if n < 1:
        raise ValueError("depth must be at least 1")
    if seq.length is not None and n > seq.length:
        raise IndexError(f"depth {n} beyond explicit list of {seq.length}")
    if 1 << n > atom_budget:
        raise BudgetExceeded(f"2**{n} atoms exceed budget {atom_budget}")
    half = Fraction(1, 2)
    atoms: dict[Fraction, Fraction] = {Fraction(0): Fraction(1)}
    for k in range(1, n + 1):
        c = seq.c(k)
        nxt: dict[Fraction, Fraction] = {}
        for p, w in atoms.items():
            for q in (p + c, p - c):
                nxt[q] = nxt.get(q, Fraction(0)) + w * half
        atoms = nxt
    return AtomList(tuple(sorted(atoms.items())))


# ---------------------------------------------------------------------------
# Measure specification documents (JSON with bit-exact "p/q" rationals)
# ---------------------------------------------------------------------------

_SPEC_KEYS = {"atoms", "lebesgue", "bernoulli", "scale"}
_BERN_KINDS = {FACTORIAL, GEOMETRIC, EXPLICIT}


def measure_from_dict(doc: dict) -> MeasureExpr:
    if not isinstance(doc, dict):
        raise SpecFormatError("measure spec must be a JSON object")
    unknown = set(doc) - _SPEC_KEYS
    if unknown:
        raise SpecFormatError(f"unknown spec fields: {sorted(unknown)}")
    atoms = []
    for entry in doc.get("atoms", []):
        if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
            raise SpecFormatError(f"atom entry {entry!r} is not [point, weight]")
        atoms.append((parse_rational(entry[0]), parse_rational(entry[1])))
    lebesgue = doc.get("lebesgue", False)
    if not isinstance(lebesgue, bool):
        raise SpecFormatError("'lebesgue' must be a boolean")
    bern = None
    bdoc = doc.get("bernoulli")
    if bdoc is not None:
        if not isinstance(bdoc, dict) or "kind" not in bdoc:
            raise SpecFormatError("'bernoulli' must be an object with a 'kind'")
        kind = bdoc["kind"]
        if kind not in _BERN_KINDS:
            raise SpecFormatError(f"unknown bernoulli kind {kind!r}")
        scale = parse_rational(bdoc.get("scale", 1))
        try:
            if kind == EXPLICIT:
                values = tuple(parse_rational(v) for v in bdoc.get("values", ()))
                bern = CoefficientSequence(EXPLICIT, scale=scale, values=values)
            else:
                base = bdoc.get("base", 3)
                if not isinstance(base, int):
                    raise SpecFormatError("'base' must be an integer")
                bern = CoefficientSequence(kind, base=base, scale=scale)
        except ValueError as exc:
            raise SpecFormatError(f"bad bernoulli descriptor: {exc}") from None
    scale = parse_rational(doc.get("scale", 1))
    try:
        return normalize(MeasureExpr(atoms=tuple(atoms), lebesgue=lebesgue,
                                     bernoulli=bern, scale=scale))
    except (ValueError, SymmetryViolation) as exc:
        raise SpecFormatError(f"invalid measure: {exc}") from None


def measure_to_dict(expr: MeasureExpr) -> dict:
    expr = normalize(expr)
    if expr.is_convolution:
        raise SpecFormatError("convolution forms have no document encoding")
    doc: dict = {
        "atoms": [[format_rational(p), format_rational(w)]
                  for p, w in expr.atoms],
        "lebesgue": expr.lebesgue,
        "bernoulli": None,
        "scale": "1",
    }
    if expr.bernoulli is not None:
        b = expr.bernoulli
        bdoc = {"kind": b.kind, "scale": format_rational(b.scale)}
        if b.kind == EXPLICIT:
            bdoc["values"] = [format_rational(v) for v in b.values]
        else:
            bdoc["base"] = b.base
        doc["bernoulli"] = bdoc
    return doc


def parse_measure_spec(text: str) -> MeasureExpr:
    """Parse a measure specification document; diagnostics carry line/column."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFormatError(f"malformed document: {exc.msg}",
                              line=exc.lineno, column=exc.colno) from None
    return measure_from_dict(doc)


def load_measure_spec(path) -> MeasureExpr:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_measure_spec(fh.read())


def dump_measure_spec(expr: MeasureExpr) -> str:
    return json.dumps(measure_to_dict(expr), indent=2, sort_keys=True) + "\n"
