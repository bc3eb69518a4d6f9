"""Weight systems from generating tuples: commutator ledgers, filtrations, gamma0.

Each generator carries a positive weight (the reciprocal of its stability
index); commutator weights add.  Logarithms of the non-trivial commutators
span a decreasing chain of subspaces of the Lie algebra; the thresholds where
the dimension drops define the filtration, the layer dimensions give the
return exponent gamma0, and axis-aligned layers give coordinatewise dilation
exponents.  All linear algebra is exact over the rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dilation import DilationStructure, dilation
from .groups import GroupLaw, log_map


@dataclass(frozen=True)
class WeightedGenerators:
    sigma: tuple[tuple, ...]
    weights: tuple[Fraction, ...]
    class_cap: int | None = None


def weighted_generators(sigma, weights, class_cap: int | None = None) -> WeightedGenerators:
    sigma = tuple(tuple(s) for s in sigma)
    weights = tuple(Fraction(w) for w in weights)
    if len(sigma) != len(weights):
        raise ValueError("one weight per generator is required")
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    return WeightedGenerators(sigma=sigma, weights=weights, class_cap=class_cap)


@dataclass(frozen=True)
class CommutatorEntry:
    expr: str                   # e.g. "[g1,[g1,g2]]" with 1-based generator indices
    length: int
    weight: Fraction
    element: tuple
    log: tuple[Fraction, ...]


def commutator_weight(a: CommutatorEntry, b: CommutatorEntry) -> Fraction:
    """Weight of the formal commutator [a, b]: weights add."""
    return a.weight + b.weight


def enumerate_commutators(gen: WeightedGenerators, law: GroupLaw) -> list[CommutatorEntry]:
    """All formal commutators up to the class cap whose evaluation is non-trivial.

    Entries with identical group element and weight are listed once.  The
    group needs a registered logarithm map.
    """
    lm = log_map(law)
    cap = gen.class_cap if gen.class_cap is not None else law.dim
    e = law.identity()

    by_length: dict[int, list[CommutatorEntry]] = {1: []}
    for i, (s, w) in enumerate(zip(gen.sigma, gen.weights)):
        if len(s) != law.dim:
            raise ValueError("generator dimension does not match the law")
        by_length[1].append(
            CommutatorEntry(expr=f"g{i + 1}", length=1, weight=w, element=s, log=lm(s))
        )

    entries = list(by_length[1])
    seen = {(entry.element, entry.weight) for entry in entries}
    for n in range(2, cap + 1):
        layer: list[CommutatorEntry] = []
        for la in range(1, n):
            lb = n - la
            for a in by_length.get(la, []):
                for b in by_length.get(lb, []):
                    c = law.commutator(a.element, b.element)
                    if c == e:
                        continue
                    entry = CommutatorEntry(
                        expr=f"[{a.expr},{b.expr}]",
                        length=n,
                        weight=commutator_weight(a, b),
                        element=c,
                        log=lm(c),
                    )
                    key = (entry.element, entry.weight)
                    if key in seen:
                        continue
                    seen.add(key)
                    layer.append(entry)
        if not layer:
            break
        by_length[n] = layer
        entries.extend(layer)
    return entries


# -- exact linear algebra -----------------------------------------------------


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Fractions; returns (rows, pivot columns).

    Pivots are chosen left to right, which keeps echelon bases axis-aligned
    whenever the span is a coordinate subspace.
    """
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pivot_row = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pv = m[r][col]
        m[r] = [v / pv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return [row for row in m[:r]], pivots


def in_span(rows: list[list[Fraction]], vec: list[Fraction]) -> bool:
    base, _ = rref(rows)
    extended, _ = rref(base + [list(vec)])
    return len(extended) == len(base)


@dataclass
class Filtration:
    thresholds: tuple[Fraction, ...]          # strictly increasing weight values
    dims: tuple[int, ...]                     # layer dimensions, summing to d
    layer_bases: tuple[tuple[tuple[Fraction, ...], ...], ...]  # exact echelon bases per layer
    exponents: tuple[Fraction, ...] | None    # per-axis exponents if axis-aligned, else None
    gamma0: Fraction

    def orthonormal_layers(self) -> list[np.ndarray]:
        out = []
        for basis in self.layer_bases:
            A = np.array([[float(v) for v in row] for row in basis], dtype=float)
            q, _ = np.linalg.qr(A.T)
            out.append(q.T[: len(basis)])
        return out


def filtration(entries: list[CommutatorEntry], dim: int) -> Filtration:
    """Build the weight filtration from a commutator ledger.

    For each achievable weight s, the subspace is the span of the logs of all
    commutators of weight >= s.  Thresholds are the weights where the span
    dimension drops; layer j has dimension dim(span_j) - dim(span_{j+1}) and
    gamma0 = sum_j threshold_j * dim(layer_j).
    """
    if not entries:
        raise ValueError("empty commutator ledger")
    weights = sorted({e.weight for e in entries})
    logs_at: dict[Fraction, list[list[Fraction]]] = {}
    for s in weights:
        logs_at[s] = [list(e.log) for e in entries if e.weight >= s]

    spans = {s: rref(logs_at[s]) for s in weights}
    dims_at = {s: len(spans[s][0]) for s in weights}
    if dims_at[weights[0]] != dim:
        raise ValueError(
            f"commutator logs span a {dims_at[weights[0]]}-dimensional subspace of R^{dim}; "
            "the generators do not generate the group"
        )

    thresholds: list[Fraction] = []
    layer_dims: list[int] = []
    layer_bases: list[tuple[tuple[Fraction, ...], ...]] = []
    for k, s in enumerate(weights):
        nxt = dims_at[weights[k + 1]] if k + 1 < len(weights) else 0
        if dims_at[s] > nxt:
            thresholds.append(s)
            layer_dims.append(dims_at[s] - nxt)
    # layer basis: echelon vectors of span_j whose pivot is not a pivot of span_{j+1}
    for j, s in enumerate(thresholds):
        rows, pivots = spans[s]
        if j + 1 < len(thresholds):
            _, higher_pivots = spans[thresholds[j + 1]]
        else:
            higher_pivots = []
        basis = tuple(
            tuple(rows[i]) for i, p in enumerate(pivots) if p not in higher_pivots
        )
        layer_bases.append(basis)

    g0 = sum((s * d for s, d in zip(thresholds, layer_dims)), Fraction(0))

    # per-axis exponents: b_i = largest threshold s with axis_i in span_s
    exponents: list[Fraction] | None = []
    for i in range(dim):
        axis = [Fraction(1 if j == i else 0) for j in range(dim)]
        found = None
        for s in reversed(thresholds):
            if in_span(logs_at[s], axis):
                found = s
                break
        if found is None:
            exponents = None
            break
        exponents.append(found)
    if exponents is not None and sum(exponents, Fraction(0)) != g0:
        exponents = None  # axis assignment inconsistent: layers are not axis-aligned

    return Filtration(
        thresholds=tuple(thresholds),
        dims=tuple(layer_dims),
        layer_bases=tuple(layer_bases),
        exponents=tuple(exponents) if exponents is not None else None,
        gamma0=g0,
    )


def to_dilation(filt: Filtration, beta=None) -> DilationStructure:
    """Coordinatewise dilation with exponents read off the filtration layers.

    Requires the adapted layers to be axis-aligned (true for the built-in
    groups); otherwise the caller must re-coordinate first.
    """
    if filt.exponents is None:
        raise ValueError(
            "filtration layers are not aligned with the coordinate axes; "
            f"layer bases: {filt.layer_bases}"
        )
    return dilation(filt.exponents, beta=beta, source="from-weights", stable=False)


def modified_weights(
    entries: list[CommutatorEntry],
    law: GroupLaw,
    power_cap: int = 64,
) -> dict[str, tuple[Fraction, bool]]:
    """Torsion-aware weights: the largest threshold s such that some power
    c^m (m <= power_cap) has its log in the rational span of the weight->=s logs.

    Returns expr -> (modified weight, certified).  certified=False means the
    cap was reached without membership at any higher level, so the value is
    only a lower bound.
    """
    lm = log_map(law)
    weights = sorted({e.weight for e in entries})
    logs_at = {s: [list(e.log) for e in entries if e.weight >= s] for s in weights}
    out: dict[str, tuple[Fraction, bool]] = {}
    for entry in entries:
        best = entry.weight
        failed_above = 0
        for s in reversed(weights):
            if s <= entry.weight:
                break
            member = False
            g = entry.element
            for _m in range(1, power_cap + 1):
                if in_span(logs_at[s], list(lm(g))):
                    member = True
                    break
                g = law.multiply(g, entry.element)
            if member:
                best = s
                break
            failed_above += 1
        # a level that failed within the power cap might still contain a higher
        # power, so any failure above the found level leaves only a lower bound
        out[entry.expr] = (best, failed_above == 0)
    return out
