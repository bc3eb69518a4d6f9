"""Straight dilations, rescaled group laws, and symbolic limit laws.

A straight dilation acts coordinatewise, scaling coordinate i by t^{b_i} with
positive exponents b_i.  Conjugating a group law by the dilation multiplies
the coefficient of each monomial by an exact rational power of t; the law has
a limit as t grows iff every such exponent is <= 0, and the limit law keeps
exactly the exponent-zero monomials.  All exponent arithmetic is done in
Fractions so the kept/dropped decision is a sign test, never a float compare.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .groups import GroupLaw, scalar_kind
from .poly import Poly


def _as_fractions(values) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) if not isinstance(v, float) else Fraction(v).limit_denominator(10**9) for v in values)


@dataclass(frozen=True)
class DilationStructure:
    """Coordinatewise scaling x_i -> t^{b_i} x_i with exact rational exponents.

    ``beta`` is the norm-scaling exponent used by the geometry layer; it must
    satisfy beta >= max_i 1/b_i and defaults to that maximum.  In stable mode
    each 1/b_i is required to lie in (0, 2).
    """

    exponents: tuple[Fraction, ...]
    beta: Fraction
    source: str = "manual"

    @property
    def dim(self) -> int:
        return len(self.exponents)

    def index_exponents(self) -> tuple[Fraction, ...]:
        """The per-coordinate stability indices 1/b_i."""
        return tuple(1 / b for b in self.exponents)

    def det_exponent(self) -> Fraction:
        """det(delta_t) = t^(sum of exponents)."""
        return sum(self.exponents, Fraction(0))


def dilation(exponents, beta=None, source: str = "manual", stable: bool = True) -> DilationStructure:
    b = _as_fractions(exponents)
    if any(bi <= 0 for bi in b):
        raise ValueError("dilation exponents must be positive")
    indices = [1 / bi for bi in b]
    if beta is None:
        beta = max(indices)
    beta = Fraction(beta) if not isinstance(beta, float) else Fraction(beta).limit_denominator(10**9)
    if beta < max(indices):
        raise ValueError(f"beta={beta} is below max_i 1/b_i = {max(indices)}")
    bad = [float(a) for a in indices if not (0 < a < 2)]
    if bad:
        if stable:
            raise ValueError(f"stability indices {bad} outside (0, 2); pass stable=False to allow")
        warnings.warn(f"stability indices {bad} outside (0, 2)", stacklevel=2)
    return DilationStructure(exponents=b, beta=beta, source=source)


def dilate(d: DilationStructure, t, x):
    """Apply delta_t coordinatewise; float result."""
    if t <= 0:
        raise ValueError("dilation parameter t must be positive")
    kind = scalar_kind(x)
    if kind == "exact" and isinstance(t, (int, Fraction)):
        out = []
        for bi, xi in zip(d.exponents, x):
            if bi.denominator == 1:
                out.append(Fraction(t) ** bi.numerator * xi)
            else:
                out.append(float(t) ** float(bi) * float(xi))
        if all(isinstance(v, Fraction) for v in out):
            return tuple(out)
        return tuple(float(v) for v in out)
    return tuple(float(t) ** float(bi) * float(xi) for bi, xi in zip(d.exponents, x))


def dilate_array(d: DilationStructure, t: float, X: np.ndarray) -> np.ndarray:
    if t <= 0:
        raise ValueError("dilation parameter t must be positive")
    scales = np.array([float(t) ** float(bi) for bi in d.exponents])
    return np.asarray(X, dtype=float) * scales


def monomial_t_exponent(x_powers, y_powers, b: tuple[Fraction, ...], coord: int) -> Fraction:
    """Power of t multiplying this monomial of p_coord after conjugation by delta_t."""
    e = -b[coord]
    for j, p in enumerate(x_powers):
        if p:
            e += p * b[j]
    for j, p in enumerate(y_powers):
        if p:
            e += p * b[j]
    return e


def rescaled_law(law: GroupLaw, d: DilationStructure, t) -> GroupLaw:
    """The conjugated law x ._t y = delta_{1/t}(delta_t(x) . delta_t(y)).

    Exact (Fraction coefficients) when every monomial t-exponent is an
    integer and t is rational; otherwise coefficients are exact rational
    values of the evaluated floats.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    b = d.exponents

    def rescale(polys, is_inverse):
        out = []
        for i, p in enumerate(polys):
            terms = {}
            for xp, yp, c in p.monomials():
                e = monomial_t_exponent(xp, yp, b, i)
                if e == 0:
                    terms[(xp, yp)] = c
                elif e.denominator == 1 and isinstance(t, (int, Fraction)):
                    terms[(xp, yp)] = c * Fraction(t) ** e.numerator
                else:
                    terms[(xp, yp)] = c * Fraction(float(t) ** float(e))
            out.append(Poly(law.dim, terms))
        return tuple(out)

    return GroupLaw(
        dim=law.dim,
        mult=rescale(law.mult, False),
        inv=rescale(law.inv, True),
        name=f"{law.name}@t={t}",
    )


@dataclass
class LimitLawResult:
    admissible: bool
    limit: GroupLaw | None
    offending: list[tuple[int, str, Fraction]]  # (coordinate, monomial, positive exponent)

    def surviving_monomials(self) -> list[tuple[int, tuple, tuple]]:
        """Nonlinear monomials of the limit multiplication, as (coord, xp, yp).

        This is the isomorphism-friendly fingerprint of the limit structure:
        it records which bracket terms survive the dilation limit.
        """
        if self.limit is None:
            return []
        out = []
        zero = (0,) * self.limit.dim
        for i, p in enumerate(self.limit.mult):
            lin = tuple(1 if j == i else 0 for j in range(self.limit.dim))
            for xp, yp, _ in p.monomials():
                if (xp, yp) in ((lin, zero), (zero, lin)):
                    continue
                out.append((i, xp, yp))
        return sorted(out)


def _monomial_label(xp, yp) -> str:
    bits = []
    for j, p in enumerate(xp):
        if p:
            bits.append(f"x{j + 1}" + (f"^{p}" if p > 1 else ""))
    for j, p in enumerate(yp):
        if p:
            bits.append(f"y{j + 1}" + (f"^{p}" if p > 1 else ""))
    return "*".join(bits) if bits else "1"


def limit_law(law: GroupLaw, d: DilationStructure) -> LimitLawResult:
    """Symbolic t -> infinity limit of the rescaled law, or the diagnosis of why none exists."""
    b = d.exponents
    if len(b) != law.dim:
        raise ValueError("dilation dimension does not match the law")
    offending: list[tuple[int, str, Fraction]] = []

    def take_limit(polys):
        out = []
        for i, p in enumerate(polys):
            terms = {}
            for xp, yp, c in p.monomials():
                e = monomial_t_exponent(xp, yp, b, i)
                if e > 0:
                    offending.append((i, _monomial_label(xp, yp), e))
                elif e == 0:
                    terms[(xp, yp)] = c
            out.append(Poly(law.dim, terms))
        return tuple(out)

    mult = take_limit(law.mult)
    inv = take_limit(law.inv)
    if offending:
        return LimitLawResult(admissible=False, limit=None, offending=sorted(offending))
    limit = GroupLaw(dim=law.dim, mult=mult, inv=inv, name=f"{law.name}@limit")
    return LimitLawResult(admissible=True, limit=limit, offending=[])


def check_automorphism(limit: GroupLaw, d: DilationStructure) -> bool:
    """True iff delta_t is an exact automorphism of the law (all t-exponents zero)."""
    b = d.exponents
    for polys in (limit.mult, limit.inv):
        for i, p in enumerate(polys):
            for xp, yp, _ in p.monomials():
                if monomial_t_exponent(xp, yp, b, i) != 0:
                    return False
    return True


@dataclass
class ProbeResult:
    t_grid: list[float]
    rows: list[tuple]           # delta_{1/t}(delta_t(x) . delta_t(y)) per t
    bounded: bool
    final_deviation: float | None  # max |row - reference| at the largest t, if a reference exists


def numeric_limit_probe(law: GroupLaw, d: DilationStructure, x, y, t_grid=None) -> ProbeResult:
    """Numerically rescale a single product along a t grid.

    Serves as an independent check on ``limit_law``: admissible structures
    give rows converging to the symbolic x . y limit, inadmissible ones give
    rows that blow up along the grid.
    """
    if t_grid is None:
        t_grid = [10.0**k for k in range(1, 7)]
    t_grid = list(t_grid)
    if any(t <= 0 for t in t_grid) or sorted(t_grid) != t_grid:
        raise ValueError("t grid must be positive and increasing")
    xf = tuple(float(v) for v in x)
    yf = tuple(float(v) for v in y)
    rows = []
    for t in t_grid:
        ax = dilate(d, t, xf)
        ay = dilate(d, t, yf)
        prod = law.multiply(ax, ay)
        rows.append(dilate(d, 1.0 / t, prod))
    res = limit_law(law, d)
    final_dev = None
    if res.admissible:
        ref = res.limit.multiply(xf, yf)
        final_dev = max(abs(a - b) for a, b in zip(rows[-1], ref))
    norms = [max(abs(v) for v in row) for row in rows]
    bounded = norms[-1] <= 10.0 * (1.0 + min(norms))
    return ProbeResult(t_grid=t_grid, rows=rows, bounded=bounded, final_deviation=final_dev)
