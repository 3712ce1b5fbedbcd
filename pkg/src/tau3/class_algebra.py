"""Symbolic calculus of measure classes (absolute-continuity types).

A ``ClassExpr`` names the class of a symmetric measure by three kinds of
components: a countable atomic support (finite set or rational lattice with
coset offsets), a full-Lebesgue flag, and a list of named singular tags
(two-point-convolution families, their convolution powers, translates, and
opaque mixed products).  Weights never matter here: classes only remember
where mass can live.

Relations between classes (equivalent, absolutely continuous, disjoint) are
decided by a closure-rule table over those components.  Every Disjoint or
Equivalent conclusion carries the names of the axioms it consumed; facts
that the engine does not derive (singularity of the base-3 family's powers,
absorption under the regular representation, core free-entropy bounds) live
in an explicit axiom table that users may override, and Unknown is a
first-class outcome whenever no rule applies.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .errors import SpecFormatError
from .measures import (DEFAULT_ATOM_BUDGET, EXPLICIT, GEOMETRIC,
                       CoefficientSequence, MeasureExpr, bernoulli_partial,
                       format_rational, normalize, parse_rational)
from .topology import _rational_gcd

# ---------------------------------------------------------------------------
# Countable supports: finite sets and rational lattices with offsets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Support:
    """Countable subset of the line: finite points or g*Z + offsets.

    kind "finite": ``points`` lists the members.
    kind "lattice": generator g > 0 with residue offsets in [0, g).
    """

    kind: str
    points: tuple[Fraction, ...] = ()
    generator: Fraction = Fraction(0)
    residues: tuple[Fraction, ...] = (Fraction(0),)

    @staticmethod
    def finite(points) -> "Support":
        return Support("finite", points=tuple(sorted(set(
            Fraction(p) for p in points))))

    @staticmethod
    def lattice(generator, residues=(Fraction(0),)) -> "Support":
        g = Fraction(generator)
        if g <= 0:
            raise ValueError("lattice generator must be positive")
        rs = tuple(sorted(set(Fraction(r) % g for r in residues)))
        return Support("lattice", generator=g, residues=rs)

    @staticmethod
    def group_generated(points) -> "Support":
        pts = [Fraction(p) for p in points if p != 0]
        if not pts:
            return Support.finite([Fraction(0)])
        return Support.lattice(_rational_gcd(pts))

    def is_finite(self) -> bool:
        return self.kind == "finite"

    def members_include(self, x: Fraction) -> bool:
        if self.is_finite():
            return x in self.points
        return (x % self.generator) in self.residues

    def subset_of(self, other: "Support") -> bool:
        if self.is_finite():
            return all(other.members_include(p) for p in self.points)
        if other.is_finite():
            return False
        ratio = self.generator / other.generator
        if ratio.denominator != 1:
            return False
        return all((r % other.generator) in other.residues
                   for r in self.residues)

    def intersects(self, other: "Support") -> bool:
        if self.is_finite():
            return any(other.members_include(p) for p in self.points)
        if other.is_finite():
            return other.intersects(self)
        g = _rational_gcd([self.generator, other.generator])
        return any((ra - rb) % g == 0
                   for ra in self.residues for rb in other.residues)

    def sumset(self, other: "Support") -> "Support":
        if self.is_finite() and other.is_finite():
            return Support.finite([a + b for a in self.points
                                   for b in other.points])
        if self.is_finite():
            return other.sumset(self)
        if other.is_finite():
            return Support.lattice(self.generator,
                                   [r + p for r in self.residues
                                    for p in other.points])
        g = _rational_gcd([self.generator, other.generator])
        return Support.lattice(g, [ra + rb for ra in self.residues
                                   for rb in other.residues])

    def describe(self) -> str:
        if self.is_finite():
            return "{" + ",".join(format_rational(p)
                                  for p in self.points) + "}"
        g = format_rational(self.generator)
        if self.residues == (Fraction(0),):
            return f"lattice({g})"
        rs = ",".join(format_rational(r) for r in self.residues)
        return f"lattice({g};+{{{rs}}})"

    def sort_key(self):
        return (self.kind, self.points, self.generator, self.residues)


# ---------------------------------------------------------------------------
# Singular tags
# ---------------------------------------------------------------------------

def _seq_key_text(key: tuple) -> str:
    kind, base, scale, values = key
    if kind == EXPLICIT:
        head = "explicit(" + ",".join(map(format_rational, values)) + ")"
    else:
        sym = "k!" if kind == "factorial" else "k"
        head = f"{base}^-{sym}"
    if scale != 1:
        head = f"{format_rational(scale)}*{head}"
    return head


@dataclass(frozen=True)
class SingularTag:
    """Named singular-continuous class, translated along a support.

    ``components`` is the multiset of primitive two-point-convolution
    families with their convolution powers, as sorted (key, power) pairs;
    a plain family is a single pair with power 1.  Component multisets
    merge under convolution (powers add per key), which keeps the tag
    calculus commutative and associative.

    ``closed`` marks the union over n >= 1 of the n-fold convolution
    powers of the component product (the series closure); convolving a
    closed tag with anything yields an ``opaque`` tag, a flat multiset of
    constituent names supporting equality only.
    """

    components: tuple[tuple[tuple, int], ...] = ()
    closed: bool = False
    opaque: tuple[str, ...] = ()
    translates: Support = field(default_factory=lambda: Support.finite([0]))

    @staticmethod
    def of(seq: CoefficientSequence, power: int = 1,
           translates: Optional[Support] = None) -> "SingularTag":
        return SingularTag(((seq.key(), power),),
                           translates=translates or Support.finite([0]))

    def is_opaque(self) -> bool:
        return bool(self.opaque)

    def constituent_names(self) -> tuple[str, ...]:
        """Flat multiset of primitive factors, for opaque composition.

        Open tags dissolve into one name per power unit so that merging
        stays associative; closed tags are atomic constituents.
        """
        if self.is_opaque():
            return self.opaque
        if self.closed:
            body = "*".join(f"{_seq_key_text(k)}^{p}"
                            for k, p in self.components)
            return (f"series({body})",)
        return tuple(sorted(_seq_key_text(k)
                            for k, p in self.components for _ in range(p)))

    def single_key(self) -> Optional[tuple]:
        if not self.is_opaque() and len(self.components) == 1:
            return self.components[0][0]
        return None

    def describe(self) -> str:
        if self.is_opaque():
            body = "opaque[" + " (*) ".join(self.opaque) + "]"
        else:
            body = "*".join(f"bern[{_seq_key_text(k)}]^{p}"
                            for k, p in self.components)
            if self.closed:
                body = f"series({body})"
        return f"{body} @ {self.translates.describe()}"

    def sort_key(self):
        return (self.opaque, str(self.components), self.closed,
                self.translates.sort_key())

    def is_base3_geometric(self) -> bool:
        """All mass comes from powers of one base-3 geometric family."""
        key = self.single_key()
        return key is not None and key[0] == GEOMETRIC and key[1] == 3


# ---------------------------------------------------------------------------
# Axiom table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Axiom:
    name: str
    statement: str
    anchor: str


DEFAULT_AXIOMS_TEXT = """\
# Axiom table: name | statement | anchor
# Lines starting with '#' are comments; fields are separated by ' | '.
SingularPowers | The base-3 geometric two-point convolution, every finite convolution power of it, and all rational scalings and countable translates of those, are singular with respect to Lebesgue measure. | Haagerup's lacunary example; Taylor-Johnson measures in Graham-McGehee, Essays in Commutative Harmonic Analysis
LebesgueAbsorption | Convolving any finite-mass measure with a Lebesgue-class measure yields a Lebesgue-class measure. | absorption of the regular representation of the line under tensor products
AtomsVsLebesgue | Countable sets are Lebesgue-null, so atomic classes and the Lebesgue class are disjoint. | standard measure theory
BernoulliNonAtomic | Infinite two-point convolutions with square-summable coefficients, and their convolutions with other measures, are non-atomic; they are disjoint from every countable atomic class. | Jessen-Wintner purity; Graham-McGehee, Essays in Commutative Harmonic Analysis
R-CORE | If the spectral measure contains a Lebesgue summand, the associated core is the infinite free-group factor amplified by all bounded operators, its free entropy dimension exceeds 1, and the weight-intersection invariant equals the Lebesgue class. | free-probability core structure of quasi-free factors; Voiculescu's free entropy dimension estimates
R-EXACT | If the spectral measure is exactly Lebesgue plus a unit atom at 0 (log scale), the state-intersection invariant is exactly the class of that measure. | state-form refinement of the core free-entropy argument
W-IN-LAMBDA | The weight-intersection invariant is always contained in the Lebesgue class. | tensor absorption by the regular representation
TauBarFromFullCore | When the core is full, the weight-uniform topology invariant equals the topology of the core's completion group. | central-sequence analysis of full type II cores
"""


class AxiomTable:
    """Ordered, hashable collection of named axioms."""

    def __init__(self, axioms: list[Axiom]):
        self._axioms = {a.name: a for a in axioms}
        if len(self._axioms) != len(axioms):
            raise SpecFormatError("duplicate axiom names in table")

    @staticmethod
    def parse(text: str) -> "AxiomTable":
        axioms = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(" | ")]
            if len(parts) != 3:
                raise SpecFormatError(
                    "axiom lines need 'name | statement | anchor'",
                    line=lineno, column=1)
            axioms.append(Axiom(*parts))
        return AxiomTable(axioms)

    @staticmethod
    def default() -> "AxiomTable":
        return AxiomTable.parse(DEFAULT_AXIOMS_TEXT)

    @staticmethod
    def load(path) -> "AxiomTable":
        with open(path, "r", encoding="utf-8") as fh:
            return AxiomTable.parse(fh.read())

    def has(self, name: str) -> bool:
        return name in self._axioms

    def get(self, name: str) -> Axiom:
        return self._axioms[name]

    def names(self) -> tuple[str, ...]:
        return tuple(self._axioms)

    def serialize(self) -> str:
        return "".join(f"{a.name} | {a.statement} | {a.anchor}\n"
                       for a in self._axioms.values())

    def table_hash(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Class expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassExpr:
    """Measure class: atomic support + Lebesgue flag + singular tags."""

    atoms: Optional[Support] = None
    ac_lebesgue: bool = False
    tags: tuple[SingularTag, ...] = ()
    provenance: tuple[str, ...] = field(default=(), compare=False)

    def canonical(self) -> "ClassExpr":
        return replace(self, tags=tuple(sorted(set(self.tags),
                                               key=SingularTag.sort_key)))

    def with_note(self, *notes: str) -> "ClassExpr":
        return replace(self, provenance=self.provenance + notes)

    def describe(self) -> str:
        parts = []
        if self.atoms is not None:
            parts.append(f"atoms{self.atoms.describe()}")
        if self.ac_lebesgue:
            parts.append("lebesgue")
        parts.extend(t.describe() for t in self.tags)
        return " + ".join(parts) if parts else "null"

    def is_null(self) -> bool:
        return self.atoms is None and not self.ac_lebesgue and not self.tags


LEBESGUE_CLASS = ClassExpr(ac_lebesgue=True,
                           provenance=("class of the Lebesgue measure",))


def class_of(m: Union[MeasureExpr, ClassExpr],
             atom_budget: int = DEFAULT_ATOM_BUDGET) -> ClassExpr:
    """Measure class of a symbolic measure; weights are forgotten."""
    if isinstance(m, ClassExpr):
        return m.canonical()
    m = normalize(m, atom_budget)
    if m.is_convolution:
        out = None
        for f in m.factors:
            c = class_of(f, atom_budget)
            out = c if out is None else convolve(out, c)
        return out
    atoms = Support.finite([p for p, _ in m.atoms]) if m.atoms else None
    tags: tuple[SingularTag, ...] = ()
    if m.bernoulli is not None:
        if m.bernoulli.kind == EXPLICIT:
            partial = bernoulli_partial(m.bernoulli, len(m.bernoulli.values),
                                        atom_budget)
            pts = Support.finite([p for p, _ in partial.atoms])
            atoms = pts if atoms is None else _atom_union(atoms, pts)
        else:
            tags = (SingularTag.of(m.bernoulli),)
    return ClassExpr(atoms=atoms, ac_lebesgue=m.lebesgue, tags=tags,
                     provenance=(f"class of {m.describe()}",)).canonical()


def _atom_union(a: Support, b: Support) -> Support:
    if a.is_finite() and b.is_finite():
        return Support.finite(a.points + b.points)
    if a.subset_of(b):
        return b
    if b.subset_of(a):
        return a
    if not a.is_finite() and not b.is_finite():
        g = _rational_gcd([a.generator, b.generator])
        return Support.lattice(g, a.residues + b.residues)
    fin, lat = (a, b) if a.is_finite() else (b, a)
    return Support.lattice(lat.generator,
                           lat.residues + tuple(p % lat.generator
                                                for p in fin.points))


# ---------------------------------------------------------------------------
# Convolution of classes
# ---------------------------------------------------------------------------

def _convolve_tag_pair(ta: SingularTag, tb: SingularTag) -> SingularTag:
    translates = ta.translates.sumset(tb.translates)
    if not (ta.is_opaque() or tb.is_opaque() or ta.closed or tb.closed):
        merged: dict[tuple, int] = {}
        for key, p in ta.components + tb.components:
            merged[key] = merged.get(key, 0) + p
        components = tuple(sorted(merged.items(), key=lambda kp: str(kp)))
        return SingularTag(components, translates=translates)
    names = tuple(sorted(ta.constituent_names() + tb.constituent_names()))
    return SingularTag(opaque=names, translates=translates)


def convolve(a: Union[MeasureExpr, ClassExpr], b: Union[MeasureExpr, ClassExpr],
             atom_budget: int = DEFAULT_ATOM_BUDGET) -> ClassExpr:
    """Class of the convolution: componentwise with absorption rules."""
    ca, cb = class_of(a, atom_budget), class_of(b, atom_budget)
    trace = []
    atoms = None
    leb = False
    tags: list[SingularTag] = []

    finite_a = ca.atoms is not None or ca.tags
    finite_b = cb.atoms is not None or cb.tags
    if (ca.ac_lebesgue and (finite_b or cb.ac_lebesgue)) or \
       (cb.ac_lebesgue and (finite_a or ca.ac_lebesgue)):
        leb = True
        trace.append("axiom:LebesgueAbsorption")

    if ca.atoms is not None and cb.atoms is not None:
        atoms = ca.atoms.sumset(cb.atoms)
        trace.append("rule:AtomSumset")
    for ta in ca.tags:
        if cb.atoms is not None:
            tags.append(replace(ta, translates=ta.translates.sumset(cb.atoms)))
            trace.append("rule:TagTranslation")
    for tb in cb.tags:
        if ca.atoms is not None:
            tags.append(replace(tb, translates=tb.translates.sumset(ca.atoms)))
            trace.append("rule:TagTranslation")
    for ta in ca.tags:
        for tb in cb.tags:
            tags.append(_convolve_tag_pair(ta, tb))
            trace.append("rule:TagPower" if tags[-1].opaque is None
                         else "rule:TagOpaque")
    return ClassExpr(atoms=atoms, ac_lebesgue=leb, tags=tuple(tags),
                     provenance=ca.provenance + cb.provenance + tuple(trace)
                     ).canonical()


def series_class(a: Union[MeasureExpr, ClassExpr],
                 atom_budget: int = DEFAULT_ATOM_BUDGET) -> ClassExpr:
    """Class of the geometrically weighted sum of all convolution powers.

    The result is the absolute-continuity type of sum over n >= 1 of
    2**-n times the n-fold convolution power of ``a``: atomic support
    closes to the group its atoms generate, the Lebesgue flag survives
    whenever any power acquires it, and the singular families accumulate
    every power, translated along the atomic group.
    """
    c = class_of(a, atom_budget)
    trace = ["rule:SeriesClosure"]
    group = Support.group_generated(
        c.atoms.points if c.atoms is not None and c.atoms.is_finite()
        else ()) if c.atoms is not None else None
    if c.atoms is not None and not c.atoms.is_finite():
        group = c.atoms   # already a lattice
    leb = c.ac_lebesgue
    if leb:
        trace.append("axiom:LebesgueAbsorption")
    tags: list[SingularTag] = []
    base_tags = list(c.tags)
    if base_tags and leb:
        # powers pairing a singular factor with a Lebesgue factor are
        # absorbed; the purely singular powers remain
        trace.append("rule:MixedPowersAbsorbed")
    for t in base_tags:
        translates = t.translates if group is None \
            else t.translates.sumset(group)
        if t.is_opaque():
            tags.append(SingularTag(
                opaque=tuple(sorted(("series-closure",) + t.opaque)),
                translates=translates))
        else:
            tags.append(SingularTag(t.components, closed=True,
                                    translates=translates))
    if len(base_tags) > 1:
        # cross products of distinct singular summands: kept opaque
        names = tuple(sorted(n for t in base_tags
                             for n in t.constituent_names()))
        translates = (Support.finite([0]) if group is None else group)
        tags.append(SingularTag(opaque=("mixed-products",) + names,
                                translates=translates))
    return ClassExpr(atoms=group, ac_lebesgue=leb, tags=tuple(tags),
                     provenance=c.provenance + tuple(trace)).canonical()


# ---------------------------------------------------------------------------
# Relations
# ---------------------------------------------------------------------------

class RelationKind(Enum):
    EQUIVALENT = "Equivalent"
    FIRST_AC_SECOND = "FirstAbsContSecond"
    SECOND_AC_FIRST = "SecondAbsContFirst"
    DISJOINT = "Disjoint"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Relation:
    kind: RelationKind
    trace: tuple[str, ...] = ()

    def describe(self) -> str:
        rules = ", ".join(self.trace) if self.trace else "-"
        return f"{self.kind.value} [{rules}]"


def _tag_dominated(ta: SingularTag, tb: SingularTag) -> bool:
    """Every measure in tag a's class also lies in tag b's class."""
    if ta.translates != tb.translates and \
            not ta.translates.subset_of(tb.translates):
        return False
    if ta.is_opaque() or tb.is_opaque():
        return ta.opaque == tb.opaque and ta.components == tb.components \
            and ta.closed == tb.closed
    if tb.closed and not ta.closed:
        # a must be exactly an n-fold power of b's component product
        pa, pb = dict(ta.components), dict(tb.components)
        if set(pa) != set(pb):
            return False
        ratios = set()
        for key in pb:
            if pa[key] % pb[key] != 0:
                return False
            ratios.add(pa[key] // pb[key])
        return len(ratios) == 1 and ratios.pop() >= 1
    return ta.components == tb.components and ta.closed == tb.closed


def _component_ac(kind_a: str, comp_a, b: ClassExpr) -> Optional[str]:
    """Rule name if component (kind_a, comp_a) is dominated inside b."""
    if kind_a == "atoms":
        if b.atoms is not None and comp_a.subset_of(b.atoms):
            return "rule:AtomSupportInclusion"
        return None
    if kind_a == "leb":
        return "rule:LebesgueReflexive" if b.ac_lebesgue else None
    for tb in b.tags:
        if _tag_dominated(comp_a, tb):
            return "rule:TagInclusion"
    return None


def _components(c: ClassExpr):
    if c.atoms is not None:
        yield ("atoms", c.atoms)
    if c.ac_lebesgue:
        yield ("leb", None)
    for t in c.tags:
        yield ("tag", t)


def _pair_disjoint(ka, a, kb, b, table: AxiomTable) -> Optional[str]:
    """Axiom/rule name certifying disjointness of two components, or None."""
    if ka > kb:
        out = _pair_disjoint(kb, b, ka, a, table)
        return out
    if ka == "atoms" and kb == "atoms":
        return None if a.intersects(b) else "rule:DisjointSupports"
    if ka == "atoms" and kb == "leb":
        return "axiom:AtomsVsLebesgue" if table.has("AtomsVsLebesgue") else None
    if ka == "atoms" and kb == "tag":
        return ("axiom:BernoulliNonAtomic"
                if table.has("BernoulliNonAtomic") else None)
    if ka == "leb" and kb == "leb":
        return None
    if ka == "leb" and kb == "tag":
        if b.is_base3_geometric() and table.has("SingularPowers"):
            return "axiom:SingularPowers"
        return None
    # tag vs tag: no disjointness axiom is available
    return None


def relation(a: Union[MeasureExpr, ClassExpr], b: Union[MeasureExpr, ClassExpr],
             table: Optional[AxiomTable] = None) -> Relation:
    """Componentwise relation of two classes under the axiom table."""
    table = table or AxiomTable.default()
    ca, cb = class_of(a).canonical(), class_of(b).canonical()
    if ca == cb:
        return Relation(RelationKind.EQUIVALENT, ("rule:CanonicalEquality",))

    trace_ab: list[str] = []
    a_in_b = True
    for kind, comp in _components(ca):
        rule = _component_ac(kind, comp, cb)
        if rule is None:
            a_in_b = False
            break
        trace_ab.append(rule)
    trace_ba: list[str] = []
    b_in_a = True
    for kind, comp in _components(cb):
        rule = _component_ac(kind, comp, ca)
        if rule is None:
            b_in_a = False
            break
        trace_ba.append(rule)
    if a_in_b and b_in_a:
        return Relation(RelationKind.EQUIVALENT,
                        tuple(dict.fromkeys(trace_ab + trace_ba)))
    if a_in_b:
        return Relation(RelationKind.FIRST_AC_SECOND,
                        tuple(dict.fromkeys(trace_ab)))
    if b_in_a:
        return Relation(RelationKind.SECOND_AC_FIRST,
                        tuple(dict.fromkeys(trace_ba)))

    rules: list[str] = []
    for ka, compa in _components(ca):
        for kb, compb in _components(cb):
            rule = _pair_disjoint(ka, compa, kb, compb, table)
            if rule is None:
                return Relation(RelationKind.UNKNOWN, ())
            rules.append(rule)
    if not rules:
        return Relation(RelationKind.UNKNOWN, ())
    return Relation(RelationKind.DISJOINT, tuple(dict.fromkeys(rules)))


# ---------------------------------------------------------------------------
# Canonical text form (used by certificates; parse + serialize)
# ---------------------------------------------------------------------------

def class_to_text(c: ClassExpr) -> str:
    return c.canonical().describe()


def _parse_support(text: str) -> Support:
    text = text.strip()
    if text.startswith("{"):
        body = text[1:-1]
        return Support.finite([parse_rational(p)
                               for p in body.split(",") if p])
    if text.startswith("lattice("):
        body = text[len("lattice("):-1]
        if ";+{" in body:
            gen, rest = body.split(";+{")
            residues = [parse_rational(r) for r in rest[:-1].split(",") if r]
            return Support.lattice(parse_rational(gen), residues)
        return Support.lattice(parse_rational(body))
    raise SpecFormatError(f"cannot parse support {text!r}")


def _parse_seq_key(head: str) -> tuple:
    scale = Fraction(1)
    if "*" in head and not head.startswith("explicit"):
        s, head = head.split("*", 1)
        scale = parse_rational(s)
    if head.endswith("^-k!"):
        return CoefficientSequence("factorial", int(head[:-4]), scale).key()
    if head.endswith("^-k"):
        return CoefficientSequence("geometric", int(head[:-3]), scale).key()
    raise SpecFormatError(f"cannot parse tag family {head!r}")


def _parse_tag(text: str) -> SingularTag:
    text = text.strip()
    if text.startswith("opaque["):
        raise SpecFormatError("opaque tags cannot be round-tripped from text")
    body, translates = text.rsplit(" @ ", 1)
    closed = False
    if body.startswith("series(") and body.endswith(")"):
        closed = True
        body = body[len("series("):-1]
    components = []
    for part in body.split("*bern["):
        part = part.removeprefix("bern[")
        head, power = part.rsplit("]^", 1)
        components.append((_parse_seq_key(head), int(power)))
    return SingularTag(tuple(sorted(components, key=lambda kp: str(kp))),
                       closed=closed,
                       translates=_parse_support(translates))


def class_from_text(text: str) -> ClassExpr:
    text = text.strip()
    if text == "null":
        return ClassExpr()
    atoms = None
    leb = False
    tags = []
    for part in text.split(" + "):
        part = part.strip()
        if part == "lebesgue":
            leb = True
        elif part.startswith("atoms"):
            atoms = _parse_support(part[len("atoms"):])
        else:
            tags.append(_parse_tag(part))
    return ClassExpr(atoms=atoms, ac_lebesgue=leb, tags=tuple(tags)).canonical()
