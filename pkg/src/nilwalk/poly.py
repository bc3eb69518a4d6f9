"""Sparse multivariate polynomials with exact rational coefficients.

A ``Poly`` represents a polynomial in two blocks of variables x = (x_1..x_d)
and y = (y_1..y_d).  Group multiplication laws are tuples of such polynomials;
inverse maps use only the x block.  Coefficients are ``fractions.Fraction`` so
that dilation-limit bookkeeping (which monomial survives at which exponent) is
exact, never a float comparison.

Terms are stored in a dict keyed by ``(x_powers, y_powers)`` where both parts
are tuples of non-negative ints of length d.  Zero coefficients are dropped.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, float):
        # exact binary value of the float, used only by numeric rescalings
        return Fraction(float(c))
    raise TypeError(f"unsupported coefficient type {type(c)!r}")


class Poly:
    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: dict | None = None):
        self.dim = dim
        self.terms: dict[tuple, Fraction] = {}
        if terms:
            for key, c in terms.items():
                c = _as_fraction(c)
                if c != 0:
                    self.terms[key] = c

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "Poly":
        return cls(dim)

    @classmethod
    def const(cls, dim: int, c) -> "Poly":
        z = (0,) * dim
        return cls(dim, {(z, z): _as_fraction(c)})

    @classmethod
    def x(cls, dim: int, i: int) -> "Poly":
        xp = tuple(1 if j == i else 0 for j in range(dim))
        return cls(dim, {(xp, (0,) * dim): Fraction(1)})

    @classmethod
    def y(cls, dim: int, i: int) -> "Poly":
        yp = tuple(1 if j == i else 0 for j in range(dim))
        return cls(dim, {((0,) * dim, yp): Fraction(1)})

    @classmethod
    def monomial(cls, dim: int, coeff, x_powers: Iterable[int], y_powers: Iterable[int]) -> "Poly":
        return cls(dim, {(tuple(x_powers), tuple(y_powers)): _as_fraction(coeff)})

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(self.dim, other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = out.get(key, Fraction(0)) + c
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
        return Poly(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.dim, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(self.dim, other)
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = _as_fraction(other)
            return Poly(self.dim, {k: v * c for k, v in self.terms.items()})
        out: dict[tuple, Fraction] = {}
        for (xa, ya), ca in self.terms.items():
            for (xb, yb), cb in other.terms.items():
                key = (
                    tuple(p + q for p, q in zip(xa, xb)),
                    tuple(p + q for p, q in zip(ya, yb)),
                )
                s = out.get(key, Fraction(0)) + ca * cb
                if s == 0:
                    out.pop(key, None)
                else:
                    out[key] = s
        return Poly(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative ints")
        result = Poly.const(self.dim, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return self.terms == {} and _as_fraction(other) == 0
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    # -- structure ---------------------------------------------------------

    def monomials(self) -> Iterator[tuple[tuple, tuple, Fraction]]:
        """Yield (x_powers, y_powers, coeff)."""
        for (xp, yp), c in self.terms.items():
            yield xp, yp, c

    def total_degree(self) -> int:
        return max((sum(xp) + sum(yp) for (xp, yp) in self.terms), default=0)

    def max_var_index(self) -> int:
        """Largest variable index (over both blocks) with a non-zero power, or -1."""
        top = -1
        for xp, yp in self.terms:
            for j in range(self.dim - 1, top, -1):
                if xp[j] or yp[j]:
                    top = max(top, j)
                    break
        return top

    def coefficient(self, x_powers: Iterable[int], y_powers: Iterable[int]) -> Fraction:
        return self.terms.get((tuple(x_powers), tuple(y_powers)), Fraction(0))

    def uses_y(self) -> bool:
        return any(any(yp) for (_, yp) in self.terms)

    # -- evaluation and substitution ----------------------------------------

    def eval(self, x, y=None):
        """Exact evaluation; x, y are sequences of ints/Fractions (or floats)."""
        if y is None:
            y = (0,) * self.dim
        total = 0
        for (xp, yp), c in self.terms.items():
            # keep int arithmetic when the coefficient is integral
            v = c.numerator if c.denominator == 1 else c
            for j, p in enumerate(xp):
                if p:
                    v = v * x[j] ** p
            for j, p in enumerate(yp):
                if p:
                    v = v * y[j] ** p
            total = total + v
        return total

    def substitute(self, x_subs: list["Poly"], y_subs: list["Poly"]) -> "Poly":
        """Substitute x_j -> x_subs[j], y_j -> y_subs[j] (each a Poly)."""
        out = Poly.zero(self.dim)
        for (xp, yp), c in self.terms.items():
            term = Poly.const(self.dim, c)
            for j, p in enumerate(xp):
                if p:
                    term = term * (x_subs[j] ** p)
            for j, p in enumerate(yp):
                if p:
                    term = term * (y_subs[j] ** p)
            out = out + term
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (xp, yp), c in sorted(self.terms.items()):
            factors = [] if c != 1 or not (any(xp) or any(yp)) else []
            if c != 1 or not (any(xp) or any(yp)):
                factors.append(str(c))
            for j, p in enumerate(xp):
                if p:
                    factors.append(f"x{j + 1}" + (f"^{p}" if p > 1 else ""))
            for j, p in enumerate(yp):
                if p:
                    factors.append(f"y{j + 1}" + (f"^{p}" if p > 1 else ""))
            bits.append("*".join(factors))
        return " + ".join(bits)


def x_vars(dim: int) -> list[Poly]:
    return [Poly.x(dim, i) for i in range(dim)]


def y_vars(dim: int) -> list[Poly]:
    return [Poly.y(dim, i) for i in range(dim)]


def zeros(dim: int, n: int | None = None) -> list[Poly]:
    return [Poly.zero(dim) for _ in range(n if n is not None else dim)]
