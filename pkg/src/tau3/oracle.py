"""Brute-force numerical cross-checks on uniform grids.

Everything here is plain floating point on purpose: the grid oracle is the
independent, low-tech counterpart that certified results are validated
against.  Direct convolution is the reference; the transform-based variant
is an optimization and ties are resolved in the direct one's favor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import NotPointwiseEvaluable, RangeError, SnapError, StepMismatch
from .measures import (DEFAULT_ATOM_BUDGET, MeasureExpr, bernoulli_partial,
                       normalize)

#: |t| * extent cap keeping cos arguments accurate to ~1e-12
FLOAT_SAFETY = float(1 << 20)

MASS_TOL = 1e-12


@dataclass(frozen=True)
class GridMeasure:
    """Finite measure sampled on origin + step * k, weights as floats."""

    origin: Fraction
    step: Fraction
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights",
                           np.asarray(self.weights, dtype=np.float64))
        if self.step <= 0:
            raise ValueError("grid step must be positive")

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def points(self) -> np.ndarray:
        n = len(self.weights)
        return np.float64(self.origin) + np.float64(self.step) * np.arange(n)

    @property
    def extent(self) -> float:
        pts = self.points()
        if len(pts) == 0:
            return 0.0
        return max(abs(pts[0]), abs(pts[-1]))

    def trimmed(self) -> "GridMeasure":
        """Drop zero-weight margins (canonical form for comparisons)."""
        nz = np.nonzero(self.weights)[0]
        if len(nz) == 0:
            return GridMeasure(Fraction(0), self.step, np.zeros(1))
        lo, hi = int(nz[0]), int(nz[-1])
        return GridMeasure(self.origin + self.step * lo, self.step,
                           self.weights[lo:hi + 1].copy())


def discretize(expr: MeasureExpr, step, bernoulli_depth: int = 8,
               strict_snap: bool = True,
               atom_budget: int = DEFAULT_ATOM_BUDGET) -> GridMeasure:
    """Sample a finite-mass symbolic measure onto a uniform grid.

    The two-point-convolution part is replaced by its depth-fold partial
    expansion.  Atoms must land on grid points when ``strict_snap`` is set;
    otherwise they snap to the nearest point.  Mass is preserved exactly up
    to float summation (well within 1e-12).
    """
    step = Fraction(step)
    expr = normalize(expr, atom_budget)
    if expr.lebesgue:
        raise NotPointwiseEvaluable(
            "the Lebesgue component cannot be discretized without a window")
    if expr.is_convolution:
        out = None
        for f in expr.factors:
            g = discretize(f, step, bernoulli_depth, strict_snap, atom_budget)
            out = g if out is None else grid_convolve(out, g)
        return out

    pairs = [(Fraction(p), float(w)) for p, w in expr.atoms]
    if expr.bernoulli is not None:
        depth = bernoulli_depth
        if expr.bernoulli.length is not None:
            depth = min(depth, expr.bernoulli.length)
        partial = bernoulli_partial(expr.bernoulli, depth, atom_budget)
        base = list(pairs)
        pairs = [(Fraction(p), float(w)) for p, w in partial.atoms]
        pairs.extend(base)
    if not pairs:
        return GridMeasure(Fraction(0), step, np.zeros(1))

    idx = []
    for p, w in pairs:
        q = p / step
        if q.denominator == 1:
            idx.append((int(q), w))
            continue
        if strict_snap:
            raise SnapError(f"atom at {p} is off the grid of step {step}")
        idx.append((round(q), w))
    lo = min(i for i, _ in idx)
    hi = max(i for i, _ in idx)
    weights = np.zeros(hi - lo + 1)
    for i, w in idx:
        weights[i - lo] += w
    return GridMeasure(step * lo, step, weights)


def grid_convolve(a: GridMeasure, b: GridMeasure,
                  method: str = "direct") -> GridMeasure:
    """Convolution of two grid measures with equal steps.

    method "direct" is the reference O(n*m) sum; "fft" is the transform
    optimization and must agree with it to rounding.
    """
    if a.step != b.step:
        raise StepMismatch(f"steps differ: {a.step} vs {b.step}")
    if method == "direct":
        weights = np.convolve(a.weights, b.weights)
    elif method == "fft":
        n = len(a.weights) + len(b.weights) - 1
        size = 1 << (n - 1).bit_length()
        fa = np.fft.rfft(a.weights, size)
        fb = np.fft.rfft(b.weights, size)
        weights = np.fft.irfft(fa * fb, size)[:n]
    else:
        raise ValueError(f"unknown convolution method {method!r}")
    return GridMeasure(a.origin + b.origin, a.step, weights)


def grid_ft(g: GridMeasure, t: float) -> float:
    """Direct transform value sum_j w_j * cos(2*pi*x_j*t) at a float t."""
    t = float(t)
    if abs(t) * g.extent > FLOAT_SAFETY:
        raise RangeError(
            f"|t|*extent = {abs(t) * g.extent:.3g} exceeds the float "
            f"safety bound {FLOAT_SAFETY:.3g}")
    pts = g.points()
    return float(np.sum(g.weights * np.cos(2.0 * math.pi * pts * t)))


# ---------------------------------------------------------------------------
# Randomized agreement suite (used by tests and the oracle-check command)
# ---------------------------------------------------------------------------

@dataclass
class OracleReport:
    cases: int
    containment_checked: int
    convolution_checked: int
    atom_exact_checked: int
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def _random_atom_measure(rng, max_atoms: int = 12,
                         dyadic: bool = False) -> MeasureExpr:
    atoms = {}
    denoms = (1, 2, 4, 8) if dyadic else (1, 2, 3, 4, 6, 9, 27)
    for _ in range(rng.randint(1, max_atoms)):
        p = Fraction(rng.randint(0, 24), rng.choice(denoms))
        w = Fraction(rng.randint(1, 8),
                     rng.choice((2, 4, 8)) if dyadic else rng.randint(1, 8))
        atoms[p] = atoms.get(p, 0) + w
        if p != 0:
            atoms[-p] = atoms.get(-p, 0) + w
    return MeasureExpr(atoms=tuple(atoms.items()))


def _random_truncated_bernoulli(rng, max_depth: int = 12) -> MeasureExpr:
    # dyadic coefficients keep the commensurate grid step coarse enough
    # for dense arrays: the finest step is 2**-(k0+depth)
    from .measures import CoefficientSequence
    depth = rng.randint(2, max_depth)
    k0 = rng.randint(0, 2)
    num = rng.choice((1, 3))
    values = tuple(Fraction(num, 1 << (k0 + j + 2)) for j in range(depth))
    return MeasureExpr(bernoulli=CoefficientSequence(
        "explicit", values=values, scale=Fraction(1, rng.choice((1, 2)))))


def oracle_suite(cases: int = 1000, seed: int = 20240, depth: int = 12,
                 bits: Optional[int] = None) -> OracleReport:
    """Randomized cross-validation of grids against certified evaluation.

    Per case: a random atomic or truncated-convolution measure, a random
    rational argument |t| <= 100; checks the float transform lies inside
    the certified interval (inflated by float slack), the convolution
    theorem on grids, and exact agreement of delta-atom convolution with
    the symbolic one.
    """
    import random

    from .fourier import ft_point
    from .measures import AtomList, convolve_atoms

    rng = random.Random(seed)
    report = OracleReport(cases, 0, 0, 0, [])
    slack = 1e-9
    for i in range(cases):
        mode = i % 3
        if mode == 0:
            expr = _random_atom_measure(rng)
            step = Fraction(1, 108)
        elif mode == 1:
            expr = _random_truncated_bernoulli(rng, depth)
            step = None
        else:
            expr = _random_atom_measure(rng, max_atoms=6, dyadic=True)
            step = Fraction(1, 16)
        t = Fraction(rng.randint(-10000, 10000), rng.randint(1, 100))
        if abs(t) > 100:
            t = t % 100

        iv = ft_point(expr, t, bits=bits)
        if step is None:
            # evaluate the truncated convolution directly at full depth
            seq = expr.bernoulli
            g = discretize(expr, _finest_step(seq), bernoulli_depth=len(seq.values),
                           strict_snap=False)
        else:
            g = discretize(expr, step)
        try:
            val = grid_ft(g, float(t))
        except RangeError:
            continue
        report.containment_checked += 1
        if not (float(iv.lo) - slack <= val <= float(iv.hi) + slack):
            report.failures.append(
                f"case {i}: grid value {val!r} outside "
                f"[{float(iv.lo)!r}, {float(iv.hi)!r}] at t={t}")

        if mode == 2:
            other = _random_atom_measure(rng, max_atoms=6, dyadic=True)
            ga = g
            gb = discretize(other, step)
            conv = grid_convolve(ga, gb)
            lhs = grid_ft(conv, float(t))
            rhs = grid_ft(ga, float(t)) * grid_ft(gb, float(t))
            report.convolution_checked += 1
            if abs(lhs - rhs) > 1e-9 * max(1.0, abs(rhs)):
                report.failures.append(
                    f"case {i}: convolution theorem off by {abs(lhs-rhs)!r}")
            sym = convolve_atoms(AtomList(expr.atoms), AtomList(other.atoms))
            gs = discretize(sym.to_measure(), step)
            report.atom_exact_checked += 1
            if not np.array_equal(gs.trimmed().weights,
                                  conv.trimmed().weights):
                diff = np.abs(gs.trimmed().weights - conv.trimmed().weights)
                report.failures.append(
                    f"case {i}: delta convolution mismatch, max diff "
                    f"{diff.max()!r}")
    return report


def _finest_step(seq) -> Fraction:
    from math import lcm
    den = 1
    for v in seq.values:
        den = lcm(den, (Fraction(v) * seq.scale).denominator)
    return Fraction(1, den)
