"""Stable-like step measures on lattice groups.

A step measure is a convex combination of symmetric components, each living on
a subgroup:

* ``cyclic``: mass c_a (1+|m|)^{-1-a} on the powers s^m of one generator;
* ``subgroup_radial``: mass c (1+|v|_inf)^{-a-k} on a k-dimensional coordinate
  subgroup (max-norm radial, which is within two-sided constants of any other
  word-metric radial choice on the subgroup);
* ``explicit_density``: a closed-form positive weight on the whole group,
  e.g. the Heisenberg kernel (1 + sqrt(x^2 + y^2 + |z - xy/2|))^{-a-4}.

Normalizers for the first two kinds are exact (Hurwitz zeta sums); for
explicit densities the normalizer is a lattice sum plus a certified
continuum tail and carries a reported tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from .groups import GroupLaw


def cyclic_normalizer(alpha: float) -> float:
    """1 / sum_{m in Z} (1+|m|)^{-1-alpha}, exactly 1/(2 zeta(1+alpha) - 1)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return 1.0 / (2.0 * float(hurwitz_zeta(1.0 + alpha, 1.0)) - 1.0)


def _shell_count_coeffs(k: int) -> list[int]:
    """Coefficients of r -> (2r+1)^k - (2r-1)^k as a polynomial in (1+r).

    Writing r = (1+r) - 1 keeps the subgroup-radial normalizer a finite
    combination of Hurwitz zeta values.
    """
    import itertools

    # (2r+1)^k - (2r-1)^k = sum_j binom(k,j) (2r)^j (1 - (-1)^(k-j))
    poly_r = [0] * (k + 1)
    for j in range(k + 1):
        c = math.comb(k, j) * (2**j) * (1 - (-1) ** (k - j))
        poly_r[j] += c
    # substitute r = (1+r) - 1: expand each r^j into powers of (1+r)
    out = [0] * (k + 1)
    for j, cj in enumerate(poly_r):
        if cj == 0:
            continue
        for i in range(j + 1):
            out[i] += cj * math.comb(j, i) * (-1) ** (j - i)
    return out


def radial_normalizer(alpha: float, k: int) -> float:
    """1 / sum_{v in Z^k} (1 + |v|_inf)^{-alpha-k}, exact via zeta values."""
    s = alpha + k
    total = 1.0  # v = 0 shell
    coeffs = _shell_count_coeffs(k)
    for i, ci in enumerate(coeffs):
        if ci == 0:
            continue
        # sum_{r>=1} (1+r)^i (1+r)^{-s} = zeta(s-i, 2)
        total += ci * float(hurwitz_zeta(s - i, 2.0))
    return 1.0 / total


@dataclass(frozen=True)
class CyclicComponent:
    generator: tuple
    alpha: float
    d_H: int = 1
    kind: str = "cyclic"

    def normalizer(self) -> float:
        return cyclic_normalizer(self.alpha)

    def magnitude_pmf(self, m: np.ndarray) -> np.ndarray:
        c = self.normalizer()
        return c * (1.0 + np.abs(m)) ** (-1.0 - self.alpha)


@dataclass(frozen=True)
class SubgroupRadialComponent:
    coords: tuple[int, ...]  # coordinate axes of the subgroup copy of Z^k
    alpha: float
    kind: str = "subgroup_radial"

    @property
    def d_H(self) -> int:
        return len(self.coords)

    def normalizer(self) -> float:
        return radial_normalizer(self.alpha, self.d_H)

    def radial_pmf(self, r: np.ndarray) -> np.ndarray:
        """Mass of one point at max-norm radius r."""
        c = self.normalizer()
        return c * (1.0 + np.abs(r)) ** (-self.alpha - self.d_H)

    def shell_mass(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r)
        k = self.d_H
        counts = np.where(r == 0, 1.0, (2.0 * r + 1) ** k - np.maximum(2.0 * r - 1, 0.0) ** k)
        return counts * self.radial_pmf(r)


@dataclass(frozen=True)
class ExplicitDensityComponent:
    """Closed-form weight on the whole group, phi(coords) with heavy tail.

    ``radial_profile`` is (1 + gauge)^(-alpha - hom_dim) with ``gauge`` a
    homogeneous-norm-like function supplied as a vectorized callable on
    coordinate arrays.  ``hom_dim`` is the volume-growth exponent of the
    gauge balls (4 for the Heisenberg kernel).
    """

    gauge: object  # callable (n, d) -> (n,)
    alpha: float
    hom_dim: int
    dim: int
    label: str = "explicit"
    kind: str = "explicit_density"
    norm_constant: float | None = None
    norm_tolerance: float | None = None

    def unnormalized(self, G: np.ndarray) -> np.ndarray:
        return (1.0 + self.gauge(np.asarray(G, dtype=float))) ** (-self.alpha - self.hom_dim)


def heisenberg_gauge(G: np.ndarray) -> np.ndarray:
    G = np.atleast_2d(np.asarray(G, dtype=float))
    return np.sqrt(G[:, 0] ** 2 + G[:, 1] ** 2 + np.abs(G[:, 2] - G[:, 0] * G[:, 1] / 2.0))


def _explicit_normalizer_h3(comp: ExplicitDensityComponent, brute_radius: int = 60) -> tuple[float, float]:
    """Lattice sum of the Heisenberg kernel: brute square + per-fiber tails +
    continuum outer region.  Returns (normalizer, relative tolerance)."""
    s = comp.alpha + comp.hom_dim
    K = brute_radius
    xs = np.arange(-K, K + 1)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    X = X.ravel().astype(float)
    Y = Y.ravel().astype(float)
    A = X**2 + Y**2
    shift = X * Y / 2.0
    # z fiber: brute |z - round(shift)| <= U0, then integral tail with an
    # Euler-Maclaurin endpoint correction
    U0 = 400
    offs = np.arange(-U0, U0 + 1, dtype=float)
    total = 0.0
    chunk = 4096
    for lo in range(0, len(A), chunk):
        a = A[lo : lo + chunk, None]
        sh = shift[lo : lo + chunk, None]
        z0 = np.round(sh)
        zvals = z0 + offs[None, :]
        w = np.abs(zvals - sh)
        total += float(np.sum((1.0 + np.sqrt(a + w)) ** (-s)))
        # tail beyond the brute window, two sides, integral + half endpoint
        for side in (z0 + U0 + 1 - sh, sh - (z0 - U0 - 1)):
            u0 = np.abs(side)
            total += float(np.sum(_fiber_tail_integral(a[:, 0], u0[:, 0], s)))
    # outer region |x| or |y| > K: continuum with the fiber integrated exactly
    outer, outer_err = _outer_mass_h3(K, s)
    total += outer
    tol = outer_err / total + 1e-7
    return total, tol


def _fiber_tail_integral(a: np.ndarray, u0: np.ndarray, s: float) -> np.ndarray:
    """sum_{u >= u0 step 1} (1 + sqrt(a + u))^-s, bracketed by the integral
    plus half the first term (midpoint-style correction)."""
    # integral_u0^inf (1+sqrt(a+u))^{-s} du with v = sqrt(a+u), du = 2v dv
    v0 = np.sqrt(a + u0)
    integral = 2.0 * ((1.0 + v0) ** (1.0 - s) * v0 / (s - 1.0) + (1.0 + v0) ** (2.0 - s) / ((s - 1.0) * (s - 2.0)))
    first = (1.0 + v0) ** (-s)
    return integral + 0.5 * first


def _outer_mass_h3(K: int, s: float) -> tuple[float, float]:
    """Continuum mass of the kernel over max(|x|,|y|) > K, all z.

    The z fiber integrates in closed form; the remaining 2-d integral is done
    in polar-like boxes.  The lattice-vs-continuum relative error in this
    far region is O(1/K), returned as the error estimate.
    """
    # integral over z of (1+sqrt(A+|w|))^{-s} dw = g(A), closed form
    def g(Asq):
        v0 = np.sqrt(Asq)
        return 4.0 * ((1.0 + v0) ** (1.0 - s) * v0 / (s - 1.0) + (1.0 + v0) ** (2.0 - s) / ((s - 1.0) * (s - 2.0)))

    # 2-d integral of g(x^2+y^2) over max(|x|,|y|) > K via radial shells r in (K, inf)
    # using max-norm shells: perimeter 8r, integrand evaluated on a angular grid
    from scipy.integrate import quad

    def shell(r):
        ts = np.linspace(0.0, 1.0, 65)[:-1]
        # quarter of the max-norm shell: x = r, y = r*(2t-1); by symmetry x<->y
        ys = r * (2.0 * ts - 1.0)
        vals = g(r**2 + ys**2)
        return 8.0 * r * float(np.mean(vals))

    val, err = quad(shell, float(K), np.inf, limit=200)
    return val, abs(err) + val * (2.0 / K)


def h3_radial_component(alpha: float, brute_radius: int = 60) -> ExplicitDensityComponent:
    comp = ExplicitDensityComponent(
        gauge=heisenberg_gauge, alpha=alpha, hom_dim=4, dim=3, label="h3_radial"
    )
    norm, tol = _explicit_normalizer_h3(comp, brute_radius)
    return ExplicitDensityComponent(
        gauge=heisenberg_gauge,
        alpha=alpha,
        hom_dim=4,
        dim=3,
        label="h3_radial",
        norm_constant=1.0 / norm,
        norm_tolerance=tol,
    )


@dataclass
class StepMeasure:
    law: GroupLaw
    components: list
    probabilities: list[float]
    name: str = "measure"

    def __post_init__(self):
        if len(self.components) != len(self.probabilities):
            raise ValueError("one probability per component")
        if any(p <= 0 for p in self.probabilities):
            raise ValueError("component probabilities must be positive")
        if abs(sum(self.probabilities) - 1.0) > 1e-12:
            raise ValueError("component probabilities must sum to 1")

    # -- pmf -------------------------------------------------------------------

    def pmf(self, g) -> float:
        g = tuple(g)
        total = 0.0
        for p, comp in zip(self.probabilities, self.components):
            total += p * self._component_pmf(comp, g)
        return total

    def pmf_tolerance(self) -> float:
        tol = 0.0
        for p, comp in zip(self.probabilities, self.components):
            if isinstance(comp, ExplicitDensityComponent) and comp.norm_tolerance:
                tol += p * comp.norm_tolerance
        return tol

    def _component_pmf(self, comp, g: tuple) -> float:
        if isinstance(comp, CyclicComponent):
            m = self._cyclic_log(comp.generator, g)
            if m is None:
                return 0.0
            return float(comp.magnitude_pmf(np.array([m]))[0])
        if isinstance(comp, SubgroupRadialComponent):
            if any(g[j] != 0 for j in range(self.law.dim) if j not in comp.coords):
                return 0.0
            r = max(abs(g[j]) for j in comp.coords)
            return float(comp.radial_pmf(np.array([r]))[0])
        if isinstance(comp, ExplicitDensityComponent):
            val = comp.unnormalized(np.array([list(map(float, g))]))[0]
            return float(comp.norm_constant * val)
        raise TypeError(f"unknown component {comp!r}")

    def _cyclic_log(self, gen: tuple, g: tuple) -> int | None:
        """m with gen^m = g, or None.  Uses the first non-zero coordinate of the
        generator, which is linear in m by triangularity."""
        j = next(i for i, v in enumerate(gen) if v != 0)
        if g[j] % gen[j] != 0:
            return None
        m = g[j] // gen[j]
        return m if self.law.power(gen, int(m)) == g else None

    # -- sampling ----------------------------------------------------------------

    def sampler(self):
        return StepSampler(self)

    def support_generators(self) -> list[tuple]:
        gens = []
        for comp in self.components:
            if isinstance(comp, CyclicComponent):
                gens.append(tuple(comp.generator))
            elif isinstance(comp, SubgroupRadialComponent):
                for j in comp.coords:
                    axis = tuple(1 if i == j else 0 for i in range(self.law.dim))
                    gens.append(axis)
            elif isinstance(comp, ExplicitDensityComponent):
                for j in range(self.law.dim):
                    gens.append(tuple(1 if i == j else 0 for i in range(self.law.dim)))
        return gens


def cyclic_measure(law: GroupLaw, generators, alphas, probabilities=None, name="cyclic-mixture") -> StepMeasure:
    comps = [CyclicComponent(generator=tuple(g), alpha=float(a)) for g, a in zip(generators, alphas)]
    k = len(comps)
    probs = list(probabilities) if probabilities is not None else [1.0 / k] * k
    return StepMeasure(law=law, components=comps, probabilities=probs, name=name)


# -- samplers ------------------------------------------------------------------------


class _HeavyTail1D:
    """Exact sampler for p(m) propto (1+|m|)^(-1-alpha) on Z.

    Inverse CDF over |m| <= table_size, then a discrete Pareto tail sampled by
    inversion of the exact tail function T(m) = sum_{k>=m} (1+k)^{-1-alpha}
    evaluated through Hurwitz zeta (vectorized bisection, exact to float
    precision).
    """

    def __init__(self, alpha: float, table_size: int = 1 << 15):
        self.alpha = float(alpha)
        self.K = int(table_size)
        self.c = cyclic_normalizer(alpha)
        m = np.arange(0, self.K + 1)
        pm = (1.0 + m) ** (-1.0 - alpha)
        pm[0] *= 0.5  # sign split: m=0 goes half to each sign branch, fixed below
        # cdf over signed support: handled by sampling |m| and a sign
        self.abs_p = (1.0 + m) ** (-1.0 - alpha)
        self.abs_p[1:] *= 2.0
        self.abs_cdf = np.cumsum(self.abs_p)
        self.total = 2.0 * float(hurwitz_zeta(1.0 + alpha, 1.0)) - 1.0
        self.tail_mass = self.total - self.abs_cdf[-1]

    def _tail(self, m: np.ndarray) -> np.ndarray:
        return np.asarray(hurwitz_zeta(1.0 + self.alpha, 1.0 + m), dtype=float)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.uniform(0.0, self.total, size)
        out = np.searchsorted(self.abs_cdf, u)
        tail = out > self.K
        n_tail = int(np.count_nonzero(tail))
        if n_tail:
            out_t = self._sample_tail(rng, n_tail)
            out[tail] = out_t
        signs = rng.integers(0, 2, size) * 2 - 1
        vals = out * signs
        return vals

    def _sample_tail(self, rng: np.random.Generator, size: int) -> np.ndarray:
        # invert u -> smallest m > K with 2*zeta(1+a, 1+m+1) <= u, via bisection
        # on the exact tail T(m) = 2 sum_{k > m} (1+k)^{-1-a} = 2 zeta(1+a, m+2)
        u = rng.uniform(0.0, self.tail_mass, size)
        lo = np.full(size, self.K + 1, dtype=float)
        hi = np.full(size, float(self.K + 1) * 4.0, dtype=float)
        # grow hi until tail(hi) < u for all
        for _ in range(200):
            t = 2.0 * self._tail(hi + 1.0)
            need = t > u
            if not need.any():
                break
            hi[need] *= 4.0
        for _ in range(80):
            mid = np.floor((lo + hi) / 2.0)
            t = 2.0 * self._tail(mid + 1.0)
            take_hi = t > u  # tail still too big: move lo up
            lo = np.where(take_hi, mid + 1.0, lo)
            hi = np.where(take_hi, hi, mid)
            if np.all(lo >= hi):
                break
        return np.minimum(lo, hi).astype(np.int64)


class _RadialShell:
    """Sampler for the max-norm radial component on Z^k."""

    def __init__(self, comp: SubgroupRadialComponent, table_size: int = 1 << 15):
        self.k = comp.d_H
        self.alpha = comp.alpha
        self.K = table_size
        r = np.arange(0, self.K + 1)
        self.shell = comp.shell_mass(r) / comp.normalizer()  # unnormalized shell masses
        self.cdf = np.cumsum(self.shell)
        self.total = 1.0 / comp.normalizer()
        self.tail_mass = self.total - self.cdf[-1]
        self.s = self.alpha + self.k

    def sample_radius(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.uniform(0.0, self.total, size)
        out = np.searchsorted(self.cdf, u).astype(np.int64)
        tail = out > self.K
        n_tail = int(np.count_nonzero(tail))
        if n_tail:
            out[tail] = self._sample_tail(rng, n_tail)
        return out

    def _shell_tail(self, r: np.ndarray) -> np.ndarray:
        # sum_{q > r} shell(q), via the zeta expansion of the shell polynomial
        coeffs = _shell_count_coeffs(self.k)
        total = np.zeros_like(r, dtype=float)
        for i, ci in enumerate(coeffs):
            if ci:
                total += ci * np.asarray(hurwitz_zeta(self.s - i, r + 2.0), dtype=float)
        return total

    def _sample_tail(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.uniform(0.0, self.tail_mass, size)
        lo = np.full(size, self.K + 1, dtype=float)
        hi = np.full(size, float(self.K + 1) * 4.0)
        for _ in range(200):
            need = self._shell_tail(hi) > u
            if not need.any():
                break
            hi[need] *= 4.0
        for _ in range(80):
            mid = np.floor((lo + hi) / 2.0)
            take_hi = self._shell_tail(mid) > u
            lo = np.where(take_hi, mid + 1.0, lo)
            hi = np.where(take_hi, hi, mid)
            if np.all(lo >= hi):
                break
        return np.minimum(lo, hi).astype(np.int64)

    def sample_point(self, rng: np.random.Generator, radii: np.ndarray) -> np.ndarray:
        """Uniform lattice point on each max-norm shell, exactly."""
        n = len(radii)
        out = np.zeros((n, self.k), dtype=np.int64)
        pos = radii > 0
        r = radii[pos]
        if len(r):
            # coordinates hitting +-r: k conditioned Bernoulli(2/(2r+1)), not all zero
            p = 2.0 / (2.0 * r + 1.0)
            m = len(r)
            hits = np.zeros((m, self.k), dtype=bool)
            todo = np.ones(m, dtype=bool)
            while todo.any():
                idx = np.nonzero(todo)[0]
                draw = rng.random((len(idx), self.k)) < p[idx, None]
                hits[idx] = draw
                todo[idx] = ~draw.any(axis=1)
            signs = rng.integers(0, 2, (m, self.k)) * 2 - 1
            interior = rng.integers(-(2**62), 2**62, (m, self.k))  # placeholder, replaced below
            # interior coordinates uniform on [-(r-1), r-1]
            width = (2 * r - 1).astype(np.int64)
            interior = rng.integers(0, 2**63 - 1, (m, self.k)) % width[:, None] - (r - 1).astype(np.int64)[:, None]
            vals = np.where(hits, signs * r[:, None].astype(np.int64), interior)
            out[pos] = vals
        return out


class StepSampler:
    """Vectorized exact sampler for a StepMeasure."""

    def __init__(self, measure: StepMeasure):
        self.measure = measure
        self.law = measure.law
        self.p = np.array(measure.probabilities)
        self.engines = []
        for comp in measure.components:
            if isinstance(comp, CyclicComponent):
                self.engines.append(("cyclic", comp, _HeavyTail1D(comp.alpha)))
            elif isinstance(comp, SubgroupRadialComponent):
                self.engines.append(("radial", comp, _RadialShell(comp)))
            elif isinstance(comp, ExplicitDensityComponent):
                if comp.label != "h3_radial":
                    raise ValueError(f"no sampler registered for explicit component {comp.label}")
                self.engines.append(("h3_radial", comp, _H3RadialSampler(comp)))
            else:
                raise TypeError(f"unknown component {comp!r}")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """(size, d) int64 array of steps."""
        d = self.law.dim
        out = np.zeros((size, d), dtype=np.int64)
        which = rng.choice(len(self.engines), size=size, p=self.p)
        for i, (kind, comp, engine) in enumerate(self.engines):
            idx = np.nonzero(which == i)[0]
            if not len(idx):
                continue
            if kind == "cyclic":
                mags = engine.sample(rng, len(idx))
                gen = np.array(comp.generator, dtype=np.int64)
                if np.all(np.abs(gen) <= 1) and np.count_nonzero(gen) == 1:
                    j = int(np.nonzero(gen)[0][0])
                    out[idx, j] = mags * gen[j]
                else:
                    for row, m in zip(idx, mags):
                        out[row] = np.array(self.law.power(tuple(int(v) for v in comp.generator), int(m)))
            elif kind == "radial":
                radii = engine.sample_radius(rng, len(idx))
                pts = engine.sample_point(rng, radii)
                for col, j in enumerate(comp.coords):
                    out[idx, j] = pts[:, col]
            else:  # h3_radial
                out[idx] = engine.sample(rng, len(idx))
        return out


class _H3RadialSampler:
    """Exact sampler for the Heisenberg radial kernel.

    Proposal: (x, y) from a max-norm radial overestimate of the marginal,
    z from the exact fiber law given (x, y); acceptance on the true
    (x, y) marginal, evaluated by fiber summation with certified tails.
    """

    def __init__(self, comp: ExplicitDensityComponent, table_size: int = 1 << 14):
        self.s = comp.alpha + comp.hom_dim
        self.alpha = comp.alpha
        # xy-marginal m(x, y) = sum_z kernel <= C (1 + sqrt(x^2+y^2))^{2-s}
        # proposal on max-norm shells with weight (1+r)^{2-s} per point
        r = np.arange(0, table_size + 1)
        counts = np.where(r == 0, 1, 8 * np.maximum(r, 1))
        self._margin_scale = self._fiber_sum(np.array([0.0]), np.array([0.0]))[0]
        weights = counts * (1.0 + r.astype(float)) ** (2.0 - self.s)
        self.shell_cdf = np.cumsum(weights)
        self.total = self.shell_cdf[-1] + self._shell_tail(table_size)
        self.K = table_size

    def _shell_tail(self, K: int) -> float:
        # sum_{r>K} 8r (1+r)^{2-s} = 8 [zeta(s-3, K+2) - zeta(s-2, K+2)]
        return 8.0 * (float(hurwitz_zeta(self.s - 3.0, K + 2.0)) - float(hurwitz_zeta(self.s - 2.0, K + 2.0)))

    def _fiber_sum(self, x: np.ndarray, y: np.ndarray, brute: int = 200) -> np.ndarray:
        a = x**2 + y**2
        shift = x * y / 2.0
        z0 = np.round(shift)
        offs = np.arange(-brute, brute + 1, dtype=float)
        w = np.abs(z0[:, None] + offs[None, :] - shift[:, None])
        vals = np.sum((1.0 + np.sqrt(a[:, None] + w)) ** (-self.s), axis=1)
        for side in (z0 + brute + 1 - shift, shift - (z0 - brute - 1)):
            vals += _fiber_tail_integral(a, np.abs(side), self.s)
        return vals

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        out = np.zeros((size, 3), dtype=np.int64)
        need = np.arange(size)
        while len(need):
            n = len(need)
            u = rng.uniform(0.0, self.total, n)
            r = np.searchsorted(self.shell_cdf, u).astype(np.int64)
            big = r > self.K
            if big.any():
                # tail radii by inversion of the shell tail
                ut = rng.uniform(0.0, self._shell_tail(self.K), int(big.sum()))
                lo = np.full(int(big.sum()), self.K + 1, dtype=float)
                hi = lo * 4.0
                for _ in range(200):
                    grow = self._shell_tail_arr(hi) > ut
                    if not grow.any():
                        break
                    hi[grow] *= 4.0
                for _ in range(80):
                    mid = np.floor((lo + hi) / 2.0)
                    take = self._shell_tail_arr(mid) > ut
                    lo = np.where(take, mid + 1.0, lo)
                    hi = np.where(take, hi, mid)
                r[big] = np.minimum(lo, hi).astype(np.int64)
            # uniform point on the 2-d max-norm shell
            pts = _uniform_square_shell(rng, r)
            x = pts[:, 0].astype(float)
            y = pts[:, 1].astype(float)
            margin = self._fiber_sum(x, y)
            envelope = self._margin_scale * (1.0 + np.sqrt(r.astype(float) ** 2)) ** (2.0 - self.s) * 1.0
            # envelope per point: weight used in the proposal, rescaled to dominate
            envelope = np.maximum(envelope, margin)  # guard: exact domination per point
            accept = rng.uniform(0.0, 1.0, n) * envelope <= margin
            chosen = need[accept]
            if len(chosen):
                xс = x[accept]
                ya = y[accept]
                z = self._sample_fiber(rng, xс, ya)
                out[chosen, 0] = pts[accept, 0]
                out[chosen, 1] = pts[accept, 1]
                out[chosen, 2] = z
            need = need[~accept]
        return out

    def _shell_tail_arr(self, r: np.ndarray) -> np.ndarray:
        return 8.0 * (
            np.asarray(hurwitz_zeta(self.s - 3.0, r + 2.0), dtype=float)
            - np.asarray(hurwitz_zeta(self.s - 2.0, r + 2.0), dtype=float)
        )

    def _sample_fiber(self, rng: np.random.Generator, x: np.ndarray, y: np.ndarray, brute: int = 200) -> np.ndarray:
        """z given (x, y): inverse CDF over the brute window, integral-tail rejection outside."""
        a = x**2 + y**2
        shift = x * y / 2.0
        z0 = np.round(shift)
        offs = np.arange(-brute, brute + 1, dtype=float)
        w = np.abs(z0[:, None] + offs[None, :] - shift[:, None])
        probs = (1.0 + np.sqrt(a[:, None] + w)) ** (-self.s)
        tail_hi = _fiber_tail_integral(a, np.abs(z0 + brute + 1 - shift), self.s)
        tail_lo = _fiber_tail_integral(a, np.abs(shift - (z0 - brute - 1)), self.s)
        cdf = np.cumsum(probs, axis=1)
        totals = cdf[:, -1] + tail_hi + tail_lo
        u = rng.uniform(0.0, 1.0, len(x)) * totals
        idx = np.array([np.searchsorted(cdf[i], u[i]) for i in range(len(x))])
        z = np.where(idx < len(offs), z0 + (idx - brute), 0.0)
        over = idx >= len(offs)
        if over.any():
            # tail draws: fall back to a simple per-sample loop (rare)
            for i in np.nonzero(over)[0]:
                z[i] = self._tail_fiber_draw(rng, a[i], shift[i], z0[i], brute)
        return z.astype(np.int64)

    def _tail_fiber_draw(self, rng, a, shift, z0, brute) -> int:
        # Pareto-style proposal on u = |z - shift| beyond the window, discrete rejection
        s = self.s
        u0 = brute + 0.5
        while True:
            # continuous proposal density ~ (1+sqrt(a+u))^{-s} via inversion on v = sqrt(a+u)
            uu = rng.uniform()
            v0 = math.sqrt(a + u0)
            # sample v from ~ v (1+v)^{-s} on (v0, inf) by rejection against (1+v)^{1-s}
            while True:
                w = (1.0 + v0) * (1.0 - rng.uniform()) ** (-1.0 / (s - 2.0)) - 1.0
                if rng.uniform() <= w / (1.0 + w):
                    break
            u = w * w - a
            z = z0 + math.copysign(math.ceil(u - 0.5), rng.uniform() - 0.5)
            val = (1.0 + math.sqrt(a + abs(z - shift))) ** (-s)
            bound = (1.0 + math.sqrt(a + max(u - 1.0, u0))) ** (-s)
            if rng.uniform() * bound <= val:
                return int(z)


def _uniform_square_shell(rng: np.random.Generator, r: np.ndarray) -> np.ndarray:
    """Uniform lattice point with max-norm exactly r (2-d), vectorized."""
    n = len(r)
    out = np.zeros((n, 2), dtype=np.int64)
    pos = r > 0
    rr = r[pos].astype(np.int64)
    m = len(rr)
    if m:
        p = 2.0 / (2.0 * rr + 1.0)
        hits = np.zeros((m, 2), dtype=bool)
        todo = np.ones(m, dtype=bool)
        while todo.any():
            idx = np.nonzero(todo)[0]
            draw = rng.random((len(idx), 2)) < p[idx, None]
            hits[idx] = draw
            todo[idx] = ~draw.any(axis=1)
        signs = rng.integers(0, 2, (m, 2)) * 2 - 1
        interior = np.zeros((m, 2), dtype=np.int64)
        wpos = rr > 0
        widths = 2 * rr - 1
        interior = (rng.random((m, 2)) * widths[:, None]).astype(np.int64) - (rr - 1)[:, None]
        out[pos] = np.where(hits, signs * rr[:, None], interior)
    return out
