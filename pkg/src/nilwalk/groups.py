"""Nilpotent groups in polynomial coordinates.

A group is a chart ``(R^d, .)`` whose multiplication and inverse are given by
polynomial maps P = (p_1..p_d), Q = (q_1..q_d) with the triangular structure

    p_i(x, y) = x_i + y_i + pbar_i(x_1..x_{i-1}, y_1..y_{i-1}),
    q_i(x)    = -x_i + qbar_i(x_1..x_{i-1}),

where pbar_i, qbar_i carry no constant or linear terms.  Triangularity makes
Lebesgue measure a Haar measure, and lets the inverse map be derived from P by
a coordinatewise solve.  Lattice elements (integer coordinates) stay exact
under all operations; float elements use plain float arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .poly import Poly, x_vars, y_vars

EXACT_TYPES = (int, Fraction, np.integer)


def scalar_kind(coords) -> str:
    """Classify coordinates as "exact" (int/Fraction) or "float"."""
    if all(isinstance(c, EXACT_TYPES) for c in coords):
        return "exact"
    if all(isinstance(c, (float, np.floating)) for c in coords):
        return "float"
    raise TypeError(f"mixed scalar kinds in element {coords!r}")


@dataclass(frozen=True)
class GroupLaw:
    """Polynomial coordinate presentation of a simply connected nilpotent group."""

    dim: int
    mult: tuple[Poly, ...]
    inv: tuple[Poly, ...]
    name: str = "custom"
    _compiled: dict = field(default_factory=dict, compare=False, repr=False)

    # -- element operations --------------------------------------------------

    def identity(self, kind: str = "exact") -> tuple:
        z = 0 if kind == "exact" else 0.0
        return (z,) * self.dim

    def multiply(self, a, b) -> tuple:
        if len(a) != self.dim or len(b) != self.dim:
            raise ValueError("element dimension does not match the law")
        ka, kb = scalar_kind(a), scalar_kind(b)
        if ka != kb:
            raise TypeError(f"cannot multiply {ka} element by {kb} element")
        return tuple(p.eval(a, b) for p in self.mult)

    def inverse(self, a) -> tuple:
        if len(a) != self.dim:
            raise ValueError("element dimension does not match the law")
        scalar_kind(a)
        return tuple(q.eval(a) for q in self.inv)

    def power(self, a, n: int) -> tuple:
        """a^n by square and multiply (exact for integer coordinates)."""
        if n < 0:
            return self.power(self.inverse(a), -n)
        result = self.identity(scalar_kind(a))
        base = a
        while n:
            if n & 1:
                result = self.multiply(result, base)
            base = self.multiply(base, base)
            n >>= 1
        return result

    def commutator(self, a, b) -> tuple:
        return self.multiply(
            self.multiply(self.inverse(a), self.inverse(b)),
            self.multiply(a, b),
        )

    # -- vectorized float operations -----------------------------------------

    def _compiled_mult(self):
        key = "mult"
        if key not in self._compiled:
            per_coord = []
            for i, p in enumerate(self.mult):
                extra = []
                for xp, yp, c in p.monomials():
                    lin_x = tuple(1 if j == i else 0 for j in range(self.dim))
                    if (xp, yp) == (lin_x, (0,) * self.dim) or (xp, yp) == ((0,) * self.dim, lin_x):
                        continue
                    extra.append((c, xp, yp))
                per_coord.append(extra)
            self._compiled[key] = per_coord
        return self._compiled[key]

    def multiply_array(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Rowwise product of (n, d) coordinate arrays.  Works for float dtype
        and for object dtype (python ints/Fractions, exact)."""
        A = np.asarray(A)
        B = np.asarray(B)
        exact = A.dtype == object
        out = A + B
        for i, extra in enumerate(self._compiled_mult()):
            for c, xp, yp in extra:
                coeff = c if exact else float(c)
                term = np.full(A.shape[0], coeff, dtype=object if exact else float)
                for j, p in enumerate(xp):
                    if p:
                        term = term * A[:, j] ** p
                for j, p in enumerate(yp):
                    if p:
                        term = term * B[:, j] ** p
                out[:, i] = out[:, i] + term
        return out

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        def dump(polys):
            out = []
            for p in polys:
                out.append(
                    [[c.numerator, c.denominator, list(xp), list(yp)] for xp, yp, c in p.monomials()]
                )
            return out

        return {"dim": self.dim, "name": self.name, "mult": dump(self.mult), "inv": dump(self.inv)}

    @classmethod
    def from_dict(cls, data: dict) -> "GroupLaw":
        dim = int(data["dim"])

        def load(entries):
            polys = []
            for mono_list in entries:
                terms = {}
                for num, den, xp, yp in mono_list:
                    terms[(tuple(xp), tuple(yp))] = Fraction(num, den)
                polys.append(Poly(dim, terms))
            return tuple(polys)

        return cls(dim=dim, mult=load(data["mult"]), inv=load(data["inv"]), name=data.get("name", "custom"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GroupLaw":
        return cls.from_dict(json.loads(text))


def derive_inverse(mult: tuple[Poly, ...]) -> tuple[Poly, ...]:
    """Solve P(x, Q(x)) = 0 coordinate by coordinate using triangularity."""
    dim = len(mult)
    xs = x_vars(dim)
    q: list[Poly] = []
    for i in range(dim):
        # p_i(x, q) = x_i + q_i + pbar_i(x, q_{<i}), so q_i = -x_i - pbar_i(x, q)
        pbar = mult[i] - xs[i] - Poly.y(dim, i)
        if pbar.is_zero():
            q.append(-xs[i])
            continue
        correction = pbar.substitute(xs, q + [Poly.zero(dim)] * (dim - i))
        if correction.uses_y():
            raise ValueError(f"coordinate {i + 1} is not triangular; cannot derive the inverse")
        q.append(-xs[i] - correction)
    return tuple(q)


def make_law(mult: tuple[Poly, ...], name: str = "custom", inv: tuple[Poly, ...] | None = None) -> GroupLaw:
    if inv is None:
        inv = derive_inverse(mult)
    return GroupLaw(dim=len(mult), mult=tuple(mult), inv=tuple(inv), name=name)


# -- built-in groups -----------------------------------------------------------


def _abelian(d: int) -> GroupLaw:
    mult = tuple(Poly.x(d, i) + Poly.y(d, i) for i in range(d))
    return make_law(mult, name=f"abelian({d})")


def _h3_matrix() -> GroupLaw:
    d = 3
    xs, ys = x_vars(d), y_vars(d)
    mult = (xs[0] + ys[0], xs[1] + ys[1], xs[2] + ys[2] + xs[0] * ys[1])
    return make_law(mult, name="h3_matrix")


def _h3_exp() -> GroupLaw:
    d = 3
    xs, ys = x_vars(d), y_vars(d)
    half = Fraction(1, 2)
    mult = (
        xs[0] + ys[0],
        xs[1] + ys[1],
        xs[2] + ys[2] + half * (xs[0] * ys[1] - xs[1] * ys[0]),
    )
    return make_law(mult, name="h3_exp")


def _u4_matrix() -> GroupLaw:
    # coordinates (x1..x6) = matrix entries (1,2),(2,3),(3,4),(1,3),(2,4),(1,4)
    d = 6
    xs, ys = x_vars(d), y_vars(d)
    mult = (
        xs[0] + ys[0],
        xs[1] + ys[1],
        xs[2] + ys[2],
        xs[3] + ys[3] + xs[0] * ys[1],
        xs[4] + ys[4] + xs[1] * ys[2],
        xs[5] + ys[5] + xs[0] * ys[4] + xs[3] * ys[2],
    )
    return make_law(mult, name="u4_matrix")


_BUILTIN_FACTORIES = {
    "h3_matrix": _h3_matrix,
    "h3_exp": _h3_exp,
    "u4_matrix": _u4_matrix,
}


def builtin(name: str) -> GroupLaw:
    """Return a validated built-in law: abelian(d), h3_matrix, h3_exp, u4_matrix."""
    name = name.strip()
    if name.startswith("abelian(") and name.endswith(")"):
        d = int(name[len("abelian(") : -1])
        if d < 1:
            raise ValueError("abelian dimension must be >= 1")
        law = _abelian(d)
    elif name in _BUILTIN_FACTORIES:
        law = _BUILTIN_FACTORIES[name]()
    else:
        raise ValueError(f"unknown built-in group {name!r}")
    report = validate(law)
    if not report.passed:
        raise AssertionError(f"built-in law {name} failed validation: {report.failures()}")
    return law


# -- logarithm maps for built-ins ----------------------------------------------


def log_map(law: GroupLaw):
    """Exact group-to-Lie-algebra coordinate map for built-in groups.

    Returns a callable Element -> tuple[Fraction].  In the returned
    coordinates the inverse is negation and one-parameter subgroups are lines.
    Raises for laws without a registered map.
    """
    name = law.name
    if name.startswith("abelian(") or name == "h3_exp":
        return lambda g: tuple(Fraction(c) for c in g)
    if name == "h3_matrix":
        def h3_log(g):
            x, y, z = (Fraction(c) for c in g)
            return (x, y, z - x * y / 2)

        return h3_log
    if name == "u4_matrix":
        def u4_log(g):
            x1, x2, x3, x4, x5, x6 = (Fraction(c) for c in g)
            # log(I + N) = N - N^2/2 + N^3/3 for the unipotent 4x4 matrix
            n12, n23, n34, n13, n24, n14 = x1, x2, x3, x4, x5, x6
            sq13 = n12 * n23
            sq24 = n23 * n34
            sq14 = n12 * n24 + n13 * n34
            cu14 = n12 * n23 * n34
            return (
                n12,
                n23,
                n34,
                n13 - sq13 / 2,
                n24 - sq24 / 2,
                n14 - sq14 / 2 + cu14 / 3,
            )

        return u4_log
    raise ValueError(f"no logarithm map registered for law {name!r}")


def has_log_map(law: GroupLaw) -> bool:
    try:
        log_map(law)
        return True
    except ValueError:
        return False


# -- validation -----------------------------------------------------------------


@dataclass
class ValidationReport:
    law_name: str
    checks: list[tuple[str, bool, str]]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self) -> list[str]:
        return [f"{name}: {detail}" for name, ok, detail in self.checks if not ok]

    def as_dict(self) -> dict:
        return {
            "law": self.law_name,
            "passed": self.passed,
            "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in self.checks],
        }


def _check_shape(law: GroupLaw) -> tuple[bool, str]:
    zero = (0,) * law.dim
    for i, p in enumerate(law.mult):
        lin_x = tuple(1 if j == i else 0 for j in range(law.dim))
        pbar_terms = dict(p.terms)
        pbar_terms.pop((lin_x, zero), None)
        pbar_terms.pop((zero, lin_x), None)
        if p.coefficient(lin_x, zero) != 1 or p.coefficient(zero, lin_x) != 1:
            return False, f"p_{i + 1} lacks the unit linear terms x_{i + 1} + y_{i + 1}"
        for (xp, yp), _ in pbar_terms.items():
            if sum(xp) + sum(yp) <= 1:
                return False, f"p_{i + 1} has a constant or stray linear term"
    return True, "p_i = x_i + y_i + higher order"


def _check_triangular(law: GroupLaw) -> tuple[bool, str]:
    zero = (0,) * law.dim
    for i, p in enumerate(law.mult):
        lin_x = tuple(1 if j == i else 0 for j in range(law.dim))
        for (xp, yp), _ in p.terms.items():
            if (xp, yp) in ((lin_x, zero), (zero, lin_x)):
                continue
            top = max(
                [j for j in range(law.dim) if xp[j]] + [j for j in range(law.dim) if yp[j]],
                default=-1,
            )
            if top >= i:
                return (
                    False,
                    f"p_{i + 1} depends on coordinate {top + 1} (allowed: 1..{i})",
                )
    return True, "pbar_i uses only coordinates 1..i-1"


def _check_inverse_shape(law: GroupLaw) -> tuple[bool, str]:
    zero = (0,) * law.dim
    for i, q in enumerate(law.inv):
        if q.uses_y():
            return False, f"q_{i + 1} uses y variables"
        lin = tuple(1 if j == i else 0 for j in range(law.dim))
        if q.coefficient(lin, zero) != -1:
            return False, f"q_{i + 1} does not start with -x_{i + 1}"
        for (xp, _), _c in q.terms.items():
            if xp == lin:
                continue
            if sum(xp) <= 1:
                return False, f"q_{i + 1} has a constant or stray linear term"
            top = max(j for j in range(law.dim) if xp[j])
            if top >= i:
                return False, f"q_{i + 1} depends on coordinate {top + 1}"
    return True, "q_i = -x_i + lower-coordinate correction"


def _check_inverse_identity(law: GroupLaw) -> tuple[bool, str]:
    xs = x_vars(law.dim)
    q = [qi.substitute(xs, xs) for qi in law.inv]  # polys in x only
    for i, p in enumerate(law.mult):
        comp = p.substitute(list(q), xs)  # p_i(Q(x), x)
        if not comp.is_zero():
            return False, f"p_{i + 1}(Q(x), x) != 0"
    return True, "P(Q(x), x) = 0 symbolically"


def _check_unimodular(law: GroupLaw) -> tuple[bool, str]:
    # triangular + unit diagonal in y means the Jacobian of y -> x.y is 1
    zero = (0,) * law.dim
    for i, p in enumerate(law.mult):
        lin = tuple(1 if j == i else 0 for j in range(law.dim))
        for (xp, yp), _ in p.terms.items():
            if (xp, yp) == (zero, lin):
                continue
            if any(yp[j] for j in range(i, law.dim)):
                return False, f"p_{i + 1} couples to a y coordinate >= {i + 1}"
    return True, "Jacobian of left translation is unitriangular"


def _check_degree_cap(law: GroupLaw) -> tuple[bool, str]:
    cap = law.dim
    deg = max(p.total_degree() for p in law.mult)
    if deg > cap:
        return False, f"total degree {deg} exceeds the nilpotency-class cap {cap}"
    return True, f"total degree {deg} <= {cap}"


def _check_associativity(law: GroupLaw, points: int, tol: float, seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        a, b, c = (tuple(rng.uniform(-1, 1, law.dim)) for _ in range(3))
        left = law.multiply(law.multiply(a, b), c)
        right = law.multiply(a, law.multiply(b, c))
        scale = max(1.0, max(abs(v) for v in left), max(abs(v) for v in right))
        worst = max(worst, max(abs(l - r) for l, r in zip(left, right)) / scale)
    ok = worst < tol
    return ok, f"max relative associativity residual {worst:.3e} over {points} points"


def validate(law: GroupLaw, points: int = 1000, tol: float = 1e-9, seed: int = 0) -> ValidationReport:
    """Check all structural invariants; failures are reported, not raised."""
    checks = [
        ("linear_part", *_check_shape(law)),
        ("triangular", *_check_triangular(law)),
        ("inverse_shape", *_check_inverse_shape(law)),
        ("inverse_identity", *_check_inverse_identity(law)),
        ("unimodular", *_check_unimodular(law)),
        ("degree_cap", *_check_degree_cap(law)),
        ("associativity", *_check_associativity(law, points, tol, seed)),
    ]
    return ValidationReport(law_name=law.name, checks=[(n, ok, d) for n, ok, d in checks])


def describe(law: GroupLaw) -> str:
    lines = [f"group law {law.name!r}, dimension {law.dim}"]
    for i, p in enumerate(law.mult):
        lines.append(f"  z{i + 1} = {p!r}")
    for i, q in enumerate(law.inv):
        lines.append(f"  inv{i + 1} = {q!r}")
    lines.append(f"  log map available: {has_log_map(law)}")
    return "\n".join(lines)
