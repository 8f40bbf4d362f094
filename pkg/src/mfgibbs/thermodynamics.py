"""Topological pressure, Gibbs weights, and potential algebra.

Pressure is approximated through periodic-point sums at finite depth,
P_k = (1/k) log sum over length-k words of exp(S_k psi at the periodic
point).  Potentials that only read finitely many symbols admit an exact
evaluation: depth-one potentials in closed form, deeper finite-range
ones through the spectral radius of their transfer matrix.  Everything
else converges geometrically in k and is extrapolated from successive
levels.

Potential kinds:

* BernoulliPotential      reads the first symbol only
* FiniteRangePotential    reads a fixed number of leading symbols
* GeometricPotential      log derivative of the coded map at the shifted point
* ComboPotential          a*geometric + q*base + constant

The geometric potential of an affine system collapses to a depth-one
potential, which is why the classical Cantor benchmarks are exact at
level one.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, NormalizationError
from .ifs_geometry import (IfsSystem, matrix_fixed_point, stream_point,
                           word_matrix)
from .symbolic import (ENUMERATION_CAP, PeriodicWord, SymbolStream, Word,
                       distortion_bound)

_CHUNK = 1 << 18


@dataclass(frozen=True)
class BernoulliPotential:
    """Potential reading only the first symbol: psi(omega) = lw[omega_1]."""

    log_weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.log_weights) < 2:
            raise ValueError("need at least two symbols")
        object.__setattr__(self, "log_weights",
                           tuple(float(v) for v in self.log_weights))

    @classmethod
    def from_probabilities(cls, probs) -> "BernoulliPotential":
        p = [float(v) for v in probs]
        if any(v <= 0 for v in p):
            raise ValueError("probabilities must be positive")
        return cls(tuple(math.log(v) for v in p))

    def value_at(self, stream: SymbolStream) -> float:
        return self.log_weights[stream.symbol_at(0)]

    def block_sum(self, w: PeriodicWord) -> float:
        return math.fsum(self.log_weights[s] for s in w.period.symbols)


@dataclass(frozen=True)
class FiniteRangePotential:
    """Potential reading the first `depth` symbols from a lookup table.

    table is indexed lexicographically by the leading block, so the
    block (w1, ..., wr) lives at sum(w_i * m**(r-i)).
    """

    depth: int
    alphabet_size: int
    table: tuple[float, ...]

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if len(self.table) != self.alphabet_size**self.depth:
            raise ValueError("table size must be alphabet_size**depth")
        object.__setattr__(self, "table", tuple(float(v) for v in self.table))

    def _index(self, stream: SymbolStream) -> int:
        idx = 0
        for i in range(self.depth):
            idx = idx * self.alphabet_size + stream.symbol_at(i)
        return idx

    def value_at(self, stream: SymbolStream) -> float:
        return self.table[self._index(stream)]

    def block_sum(self, w: PeriodicWord) -> float:
        stream = w.stream()
        return math.fsum(self.value_at(stream.shift(j))
                         for j in range(w.period_length))


@dataclass(frozen=True)
class GeometricPotential:
    """log of the derivative of the first coded map at the shifted point."""

    system: IfsSystem

    def value_at(self, stream: SymbolStream) -> float:
        sym = stream.symbol_at(0)
        x = stream_point(self.system, stream.shift(1))
        return math.log(self.system.maps[sym].derivative(x, check=False))

    def block_sum(self, w: PeriodicWord) -> float:
        # chain rule: the orbit sum over one period is the log derivative
        # of the composed block at its fixed point
        coeffs, logdet = word_matrix(self.system, w.period)
        x = matrix_fixed_point(coeffs, self.system.domain)
        q = coeffs[2] * x + coeffs[3]
        return logdet - 2.0 * math.log(abs(q))


@dataclass(frozen=True)
class ComboPotential:
    """geom_coeff * geometric + base_coeff * base + shift."""

    geom_coeff: float
    base: "Potential | None"
    base_coeff: float
    shift: float
    system: IfsSystem | None = None

    def __post_init__(self):
        if self.geom_coeff != 0.0 and self.system is None:
            raise ValueError("geometric component needs its system")
        if self.base_coeff != 0.0 and self.base is None:
            raise ValueError("base component missing")

    def value_at(self, stream: SymbolStream) -> float:
        total = self.shift
        if self.geom_coeff != 0.0:
            total += self.geom_coeff * GeometricPotential(self.system).value_at(stream)
        if self.base_coeff != 0.0 and self.base is not None:
            total += self.base_coeff * self.base.value_at(stream)
        return total

    def block_sum(self, w: PeriodicWord) -> float:
        total = self.shift * w.period_length
        if self.geom_coeff != 0.0:
            total += self.geom_coeff * GeometricPotential(self.system).block_sum(w)
        if self.base_coeff != 0.0 and self.base is not None:
            total += self.base_coeff * self.base.block_sum(w)
        return total


Potential = (BernoulliPotential | FiniteRangePotential | GeometricPotential
             | ComboPotential)


def _decompose(ifs: IfsSystem, psi: Potential):
    """Flatten psi into (geometric coefficient, [(coeff, leaf)], shift)."""
    if isinstance(psi, GeometricPotential):
        if psi.system is not ifs and psi.system != ifs:
            raise ValueError("geometric potential is bound to a different system")
        return 1.0, [], 0.0
    if isinstance(psi, ComboPotential):
        geom, terms, shift = 0.0, [], psi.shift
        if psi.geom_coeff != 0.0:
            if psi.system is not ifs and psi.system != ifs:
                raise ValueError("combo potential is bound to a different system")
            geom += psi.geom_coeff
        if psi.base_coeff != 0.0 and psi.base is not None:
            g2, t2, s2 = _decompose(ifs, psi.base)
            geom += psi.base_coeff * g2
            terms.extend((psi.base_coeff * c, leaf) for c, leaf in t2)
            shift += psi.base_coeff * s2
        return geom, terms, shift
    if isinstance(psi, (BernoulliPotential, FiniteRangePotential)):
        return 0.0, [(1.0, psi)], 0.0
    raise TypeError(f"not a potential: {psi!r}")


def effective_range(ifs: IfsSystem, psi: Potential) -> int | None:
    """Number of leading symbols psi depends on; None when unbounded."""
    geom, terms, _ = _decompose(ifs, psi)
    r = 1
    if geom != 0.0 and not ifs.is_affine():
        return None
    for _, leaf in terms:
        if isinstance(leaf, FiniteRangePotential):
            r = max(r, leaf.depth)
    return r


def range_table(ifs: IfsSystem, psi: Potential, r: int) -> np.ndarray:
    """Values of psi on all r-blocks, lexicographically ordered.

    Defined only when psi reads at most r symbols.
    """
    eff = effective_range(ifs, psi)
    if eff is None or eff > r:
        raise ValueError(f"potential reads more than {r} symbols")
    m = ifs.alphabet_size
    geom, terms, shift = _decompose(ifs, psi)
    out = np.full(m**r, shift, dtype=float)
    if geom != 0.0:
        logr = np.array([math.log(mp.r_min) for mp in ifs.maps])
        out += geom * np.repeat(logr, m ** (r - 1))
    for coeff, leaf in terms:
        if isinstance(leaf, BernoulliPotential):
            lw = np.asarray(leaf.log_weights)
            out += coeff * np.repeat(lw, m ** (r - 1))
        else:
            tab = np.asarray(leaf.table)
            out += coeff * np.repeat(tab, m ** (r - leaf.depth))
    return out


def _symbol_columns(m: int, k: int, lo: int, hi: int) -> np.ndarray:
    idx = np.arange(lo, hi, dtype=np.int64)
    cols = np.empty((hi - lo, k), dtype=np.int64)
    for j in range(k):
        cols[:, j] = (idx // m ** (k - 1 - j)) % m
    return cols


def _fixed_points_vec(coeffs: np.ndarray, domain) -> np.ndarray:
    a, b, c, d = coeffs[:, 0], coeffs[:, 1], coeffs[:, 2], coeffs[:, 3]
    lo, hi = domain
    slack = 1e-9 * (hi - lo)
    bb = d - a
    disc = bb * bb + 4.0 * c * b
    if np.any(disc < -1e-12):
        raise ValueError("complex fixed point in a word composition")
    root = np.sqrt(np.maximum(disc, 0.0))
    sgn = np.where(bb >= 0.0, 1.0, -1.0)
    qq = -0.5 * (bb + sgn * root)
    with np.errstate(divide="ignore", invalid="ignore"):
        x1 = np.where(c != 0.0, qq / np.where(c != 0.0, c, 1.0), b / bb)
        x2 = np.where(qq != 0.0, -b / np.where(qq != 0.0, qq, 1.0), 0.0)
    in1 = (x1 >= lo - slack) & (x1 <= hi + slack)
    x = np.where(in1, x1, x2)
    if np.any((x < lo - slack) | (x > hi + slack) | ~np.isfinite(x)):
        raise ValueError("fixed point escaped the base interval")
    return x


def _geometric_chunk(ifs: IfsSystem, sym: np.ndarray) -> np.ndarray:
    base = np.array([mp.coefficients() for mp in ifs.maps])
    logdets = np.array([mp.log_det for mp in ifs.maps])
    A = base[sym[:, 0]].copy()
    logdet = logdets[sym[:, 0]].copy()
    for j in range(1, sym.shape[1]):
        B = base[sym[:, j]]
        a = A[:, 0] * B[:, 0] + A[:, 1] * B[:, 2]
        b = A[:, 0] * B[:, 1] + A[:, 1] * B[:, 3]
        c = A[:, 2] * B[:, 0] + A[:, 3] * B[:, 2]
        d = A[:, 2] * B[:, 1] + A[:, 3] * B[:, 3]
        A = np.stack([a, b, c, d], axis=1)
        logdet += logdets[sym[:, j]]
    x = _fixed_points_vec(A, ifs.domain)
    q = np.abs(A[:, 2] * x + A[:, 3])
    return logdet - 2.0 * np.log(q)


def _sums_chunk(ifs: IfsSystem, psi: Potential, k: int, lo: int, hi: int) -> np.ndarray:
    m = ifs.alphabet_size
    geom, terms, shift = _decompose(ifs, psi)
    sym = _symbol_columns(m, k, lo, hi)
    out = np.full(hi - lo, shift * k, dtype=float)
    if geom != 0.0:
        if ifs.is_affine():
            logr = np.array([math.log(mp.r_min) for mp in ifs.maps])
            out += geom * logr[sym].sum(axis=1)
        else:
            out += geom * _geometric_chunk(ifs, sym)
    for coeff, leaf in terms:
        if isinstance(leaf, BernoulliPotential):
            lw = np.asarray(leaf.log_weights)
            out += coeff * lw[sym].sum(axis=1)
        else:
            tab = np.asarray(leaf.table)
            r = leaf.depth
            idx = np.zeros(hi - lo, dtype=np.int64)
            acc = np.zeros(hi - lo, dtype=float)
            for j in range(k):
                idx[:] = 0
                for i in range(r):
                    idx = idx * m + sym[:, (j + i) % k]
                acc += tab[idx]
            out += coeff * acc
    return out


def periodic_sums(ifs: IfsSystem, psi: Potential, k: int,
                  threads: int = 1, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """S_k psi at the periodic point of every length-k word, in lex order.

    The array is assembled from fixed-size chunks in index order, so its
    contents do not depend on the thread count.
    """
    if k < 1:
        raise ValueError("level k must be >= 1")
    m = ifs.alphabet_size
    total = m**k
    if total > cap:
        raise CapacityError(f"{m}**{k} periodic points exceed cap {cap}")
    bounds = [(lo, min(lo + _CHUNK, total)) for lo in range(0, total, _CHUNK)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(
                lambda ab: _sums_chunk(ifs, psi, k, ab[0], ab[1]), bounds))
    else:
        parts = [_sums_chunk(ifs, psi, k, lo, hi) for lo, hi in bounds]
    return parts[0] if len(parts) == 1 else np.concatenate(parts)


def _logsumexp(arr: np.ndarray) -> float:
    amax = float(np.max(arr))
    return amax + math.log(float(np.sum(np.exp(arr - amax))))


def pressure_at_level(ifs: IfsSystem, psi: Potential, k: int,
                      threads: int = 1) -> float:
    """Depth-k periodic-point approximation of the pressure."""
    return _logsumexp(periodic_sums(ifs, psi, k, threads=threads)) / k


@dataclass(frozen=True)
class PressureResult:
    value: float
    error_bound: float
    levels: tuple[float, ...] = ()


def _transfer_pressure(ifs: IfsSystem, psi: Potential, r: int) -> float:
    """Exact pressure of a potential reading r symbols.

    For r = 1 the partition sums factor exactly.  For r >= 2 the
    pressure is the log spectral radius of the transfer matrix on
    (r-1)-blocks, computed with a dense eigenvalue solve.
    """
    table = range_table(ifs, psi, r)
    if r == 1:
        return _logsumexp(table)
    m = ifs.alphabet_size
    size = m ** (r - 1)
    if size > 4096:
        raise CapacityError(f"transfer matrix of side {size} is too large")
    tmax = float(table.max())
    A = np.zeros((size, size))
    idx = np.arange(m**r)
    A[idx // m, idx % size] = np.exp(table - tmax)
    lam = float(np.max(np.abs(np.linalg.eigvals(A))))
    return tmax + math.log(lam)


def pressure(ifs: IfsSystem, psi: Potential, k_max: int = 10,
             tol: float = 1e-12, threads: int = 1) -> PressureResult:
    """Best available pressure value with an honest error bound.

    Potentials of finite range are evaluated exactly (error 0) once
    k_max reaches the range.  Otherwise successive levels are computed
    up to k_max and the geometric tail is removed by Aitken
    extrapolation; the error bound combines the last level difference
    with the extrapolation step and a distortion allowance.
    """
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    r = effective_range(ifs, psi)
    if r is not None and r <= k_max:
        return PressureResult(value=_transfer_pressure(ifs, psi, r),
                              error_bound=0.0)
    levels = []
    for k in range(1, k_max + 1):
        levels.append(pressure_at_level(ifs, psi, k, threads=threads))
        if k >= 3 and abs(levels[-1] - levels[-2]) < tol:
            break
    value = levels[-1]
    extrapolated = False
    if len(levels) >= 3:
        d1 = levels[-2] - levels[-3]
        d2 = levels[-1] - levels[-2]
        if d1 != 0.0:
            theta = d2 / d1
            if 0.0 < theta < 0.95:
                value = levels[-1] + d2 * theta / (1.0 - theta)
                extrapolated = True
    diff = abs(levels[-1] - levels[-2]) if len(levels) >= 2 else math.inf
    # a priori: level sums sit within the distortion constant over k
    apriori = diff + distortion_bound(psi, ifs, n=min(4, len(levels)),
                                      sample_budget=8) / len(levels)
    err = apriori
    if extrapolated:
        # under clean geometric decay the extrapolation step bounds the
        # remaining tail up to a modest factor
        err = min(apriori, 4.0 * abs(value - levels[-1]) + diff)
    return PressureResult(value=value, error_bound=err, levels=tuple(levels))


def normalize(ifs: IfsSystem, psi: Potential, k_max: int = 10,
              threads: int = 1) -> ComboPotential:
    """Shift psi by a constant so its pressure vanishes.

    Finite-range potentials subtract their exact pressure.  For the
    rest the depth-k_max level value is subtracted, which pins the
    level-k_max pressure of the result to zero exactly; root solves run
    at that same level, so downstream identities like beta(1) = 0 hold
    to solver precision rather than to extrapolation error.
    """
    r = effective_range(ifs, psi)
    if r is not None and r <= k_max:
        c = _transfer_pressure(ifs, psi, r)
    else:
        c = pressure_at_level(ifs, psi, k_max, threads=threads)
    if isinstance(psi, ComboPotential):
        return ComboPotential(psi.geom_coeff, psi.base, psi.base_coeff,
                              psi.shift - c, psi.system)
    if isinstance(psi, GeometricPotential):
        return ComboPotential(1.0, None, 0.0, -c, psi.system)
    return ComboPotential(0.0, psi, 1.0, -c, None)


@dataclass(frozen=True)
class GibbsWeights:
    """Normalized periodic-point weights of one cylinder level."""

    depth: int
    weights: np.ndarray
    gibbs_constant_estimate: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if np.any(w <= 0.0):
            raise ValueError("gibbs weights must be positive")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError("gibbs weights must sum to one")


def _softmax(sums: np.ndarray) -> np.ndarray:
    e = np.exp(sums - float(np.max(sums)))
    return e / float(e.sum())


def gibbs_cylinder_weights(ifs: IfsSystem, psi: Potential, n: int,
                           threads: int = 1) -> GibbsWeights:
    """Depth-n cylinder weights exp(S_n psi)/Z for a zero-pressure psi.

    Raises NormalizationError when the pressure of psi is not zero
    within max(1e-8, its own error bound); the weights formula only
    approximates the Gibbs measure in that regime.
    """
    pres = pressure(ifs, psi, k_max=max(2, min(8, n + 1)), threads=threads)
    if abs(pres.value) > max(1e-8, pres.error_bound):
        raise NormalizationError(
            f"pressure {pres.value:.3e} not zero within {pres.error_bound:.3e}")
    w_n = _softmax(periodic_sums(ifs, psi, n, threads=threads))
    w_n1 = _softmax(periodic_sums(ifs, psi, n + 1, threads=threads))
    est = _consistency(w_n, w_n1, ifs.alphabet_size)
    return GibbsWeights(depth=n, weights=w_n, gibbs_constant_estimate=est)


def _consistency(w_n: np.ndarray, w_n1: np.ndarray, m: int) -> float:
    children = w_n1.reshape(-1, m).sum(axis=1)
    ratio = w_n / children
    return float(max(ratio.max(), (1.0 / ratio).max()))


def gibbs_consistency_check(level_n: GibbsWeights, level_n1: GibbsWeights) -> float:
    """Worst mismatch between a level and its children one level down.

    Returns max over words of the ratio (either way up) between the
    depth-n weight and the sum of its children's depth-(n+1) weights.
    Exactly 1 for product measures; the gap quantifies the empirical
    Gibbs constant otherwise.
    """
    if level_n1.depth != level_n.depth + 1:
        raise ValueError("need consecutive levels")
    if len(level_n1.weights) % len(level_n.weights) != 0:
        raise ValueError("levels come from different alphabets")
    m = len(level_n1.weights) // len(level_n.weights)
    return _consistency(level_n.weights, level_n1.weights, m)


@dataclass(frozen=True)
class CohomologyReport:
    """Range of periodic ratios S_l psi / S_l phi up to a level cap."""

    ratio_min: float
    ratio_max: float
    degenerate: bool


def cohomology_diagnostic(ifs: IfsSystem, psi: Potential, ell_max: int = 6,
                          tol: float = 1e-8, threads: int = 1) -> CohomologyReport:
    """Detect whether psi is a constant multiple of the geometric potential
    up to coboundaries, by scanning periodic ratio spread.

    A spread below tol flags the degenerate case in which the whole
    multifractal spectrum collapses to a point.
    """
    if ell_max < 1:
        raise ValueError("ell_max must be >= 1")
    phi = GeometricPotential(ifs)
    lo, hi = math.inf, -math.inf
    for ell in range(1, ell_max + 1):
        s_phi = periodic_sums(ifs, phi, ell, threads=threads)
        s_psi = periodic_sums(ifs, psi, ell, threads=threads)
        ratios = s_psi / s_phi
        lo = min(lo, float(ratios.min()))
        hi = max(hi, float(ratios.max()))
    return CohomologyReport(ratio_min=lo, ratio_max=hi,
                            degenerate=(hi - lo) < tol)
