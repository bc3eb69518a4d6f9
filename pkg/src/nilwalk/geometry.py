"""Homogeneous quasi-norms, word balls, volume exponents, and bottleneck norms.

The homogeneous norm is defined as max_i |u_i|^{beta_i / beta} where
beta_i = 1/b_i are the dilation indices.  This max-power form is exactly
homogeneous under the dilations, which is all the diagnostics need; smoother
norms agree with it up to two-sided constants.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dilation import DilationStructure
from .groups import GroupLaw


@dataclass(frozen=True)
class HomNorm:
    """Max-power homogeneous norm for a dilation structure."""

    exponents: tuple[Fraction, ...]  # b_i
    beta: Fraction

    @classmethod
    def for_dilation(cls, d: DilationStructure) -> "HomNorm":
        return cls(exponents=d.exponents, beta=d.beta)

    def coordinate_powers(self) -> tuple[float, ...]:
        # |u_i| enters as |u_i|^{beta_i/beta} = |u_i|^{1/(b_i beta)}
        return tuple(float(1 / (b * self.beta)) for b in self.exponents)

    def __call__(self, u) -> float:
        powers = self.coordinate_powers()
        return max(abs(float(v)) ** p if v else 0.0 for v, p in zip(u, powers))

    def norm_array(self, U: np.ndarray) -> np.ndarray:
        U = np.asarray(U, dtype=float)
        powers = np.array(self.coordinate_powers())
        return np.max(np.abs(U) ** powers, axis=-1)

    def box_radii(self, r: float) -> tuple[float, ...]:
        """Half-widths of the coordinate box {norm < r}: |u_i| < r^{beta * b_i}."""
        return tuple(float(r) ** float(self.beta * b) for b in self.exponents)

    def unit_ball_volume(self) -> float:
        return float(np.prod([2.0 * w for w in self.box_radii(1.0)]))

    def ball_volume(self, r: float) -> float:
        # m(B(r)) = m(B(1)) r^{beta * sum b_i}
        growth = float(self.beta * sum(self.exponents, Fraction(0)))
        return self.unit_ball_volume() * float(r) ** growth


def gamma0(d: DilationStructure) -> Fraction:
    """Return-probability exponent: the sum of the dilation exponents."""
    return sum(d.exponents, Fraction(0))


# -- word metric -----------------------------------------------------------------


@dataclass
class WordMetricProbe:
    generators: list[tuple]
    radius_cap: int
    state_budget: int = 10**6
    table: dict[tuple, int] = field(default_factory=dict)


def word_ball(probe: WordMetricProbe, law: GroupLaw) -> dict[tuple, int]:
    """Exact word lengths by breadth-first search over group products.

    The generator list is symmetrized automatically.  Raises if the BFS
    frontier exceeds the state budget.
    """
    gens = []
    seen_gen = set()
    for g in probe.generators:
        for h in (tuple(g), law.inverse(tuple(g))):
            if h not in seen_gen:
                seen_gen.add(h)
                gens.append(h)
    e = law.identity()
    table = {e: 0}
    frontier = deque([e])
    while frontier:
        g = frontier.popleft()
        dist = table[g]
        if dist >= probe.radius_cap:
            continue
        for s in gens:
            h = law.multiply(g, s)
            if h not in table:
                if len(table) >= probe.state_budget:
                    raise MemoryError(
                        f"word ball exceeded the state budget {probe.state_budget}"
                    )
                table[h] = dist + 1
                frontier.append(h)
    probe.table = table
    return table


def ball_counts(table: dict[tuple, int]) -> dict[int, int]:
    """Cumulative V(r) = #{g : |g| <= r} from a word-length table."""
    rmax = max(table.values())
    counts = {r: 0 for r in range(rmax + 1)}
    for dist in table.values():
        counts[dist] += 1
    out, run = {}, 0
    for r in range(rmax + 1):
        run += counts[r]
        out[r] = run
    return out


def growth_exponent_fit(counts: dict[int, int], r_min: int = 1, r_max: int | None = None) -> float:
    """Least-squares slope of log V(r) against log r."""
    radii = sorted(r for r in counts if r >= max(1, r_min) and (r_max is None or r <= r_max))
    if len(radii) < 3:
        raise ValueError("need at least 3 radii for a growth fit")
    x = np.log([float(r) for r in radii])
    y = np.log([float(counts[r]) for r in radii])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


# -- weighted bottleneck quasi-norm ------------------------------------------------


def _reachable(law: GroupLaw, target: tuple, gens: list[tuple], caps: list[int], budget: int) -> bool:
    """Is target a product using at most caps[i] copies of gens[i]^{+-1}?

    Search over (element, usage vector) states; usage vectors are pruned to
    the Pareto frontier per element.
    """
    start = law.identity()
    zero_use = (0,) * len(gens)
    frontier = {(start, zero_use)}
    best: dict[tuple, list[tuple]] = {start: [zero_use]}
    if target == start:
        return True
    states = 1
    sym_gens = []
    for i, g in enumerate(gens):
        sym_gens.append((i, g))
        sym_gens.append((i, law.inverse(g)))
    while frontier:
        new_frontier = set()
        for elem, use in frontier:
            for i, g in sym_gens:
                if use[i] + 1 > caps[i]:
                    continue
                nelem = law.multiply(elem, g)
                nuse = tuple(u + 1 if j == i else u for j, u in enumerate(use))
                pareto = best.setdefault(nelem, [])
                if any(all(p <= q for p, q in zip(old, nuse)) for old in pareto):
                    continue
                pareto[:] = [old for old in pareto if not all(q <= p for p, q in zip(old, nuse))]
                pareto.append(nuse)
                if nelem == target:
                    return True
                new_frontier.add((nelem, nuse))
                states += 1
                if states > budget:
                    raise MemoryError(f"bottleneck norm search exceeded the state budget {budget}")
        frontier = new_frontier
    return False


def sigma_w_norm(
    g,
    generators: list[tuple],
    weights,
    law: GroupLaw,
    radius_cap: float = 16.0,
    state_budget: int = 10**6,
) -> float:
    """Exact weighted bottleneck quasi-norm at desk scale.

    The value is the least R such that g is a word using at most
    floor(R^{w_i}) copies of generator i (counting inverses).  The search is
    exhaustive over Pareto-minimal usage vectors, so it is exponential; keep
    radius_cap small.
    """
    g = tuple(g)
    weights = [Fraction(w) for w in weights]
    if g == law.identity():
        return 0.0
    candidates = sorted(
        {
            float(m) ** (1.0 / float(w))
            for w in weights
            for m in range(1, int(float(radius_cap) ** float(max(weights))) + 2)
        }
    )
    candidates = [c for c in candidates if c <= radius_cap + 1e-12]
    for value in candidates:
        caps = [int(np.floor(value ** float(w) + 1e-9)) for w in weights]
        if all(c == 0 for c in caps):
            continue
        if _reachable(law, g, [tuple(s) for s in generators], caps, state_budget):
            return value
    raise ValueError(f"element {g} not reachable within radius cap {radius_cap}")
