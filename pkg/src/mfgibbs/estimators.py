"""Distribution function of the projected Gibbs measure and estimators on it.

The measure is realized as a cascade: the mass of a cylinder splits
among its children proportionally to exp of the child's periodic-point
sum, which reproduces the product measure exactly in the first-symbol
case and stays within the usual distortion constants of the Gibbs
measure otherwise.

cdf(x) descends the cylinder tree.  At each node x either falls in a
gap between child intervals (the value is then exact: the measure is
atomless and everything to the left has been accumulated) or inside a
child, where lexicographically smaller siblings contribute their full
mass and the descent recurses.  Landing exactly on a child endpoint
also terminates exactly; shared endpoints of touching cylinders resolve
to the right child, keeping F right-continuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NormalizationError, PrecisionError, ScaleError
from .ifs_geometry import IfsSystem, check_osc, max_safe_depth, WIDTH_FLOOR
from .symbolic import PeriodicWord, Word
from .thermodynamics import (GeometricPotential, Potential, effective_range,
                             pressure, range_table)


@dataclass(frozen=True)
class DepthPolicy:
    """Descent cutoffs: stop at max_depth or when cylinder mass < mass_tol."""

    max_depth: int = 60
    mass_tol: float = 1e-8

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.mass_tol < 0:
            raise ValueError("mass_tol must be >= 0")


@dataclass(frozen=True)
class CdfValue:
    value: float
    error_bound: float


class DistributionFunction:
    """F(x) = mu((-inf, x]) for the projected cascade measure of psi.

    psi must be normalized (pressure zero within its own error bound)
    and the system must satisfy the open set condition; both are
    checked at construction.
    """

    def __init__(self, system: IfsSystem, potential: Potential,
                 policy: DepthPolicy | None = None):
        if not check_osc(system).satisfied:
            raise DomainError("distribution function requires the open set condition")
        pres = pressure(system, potential, k_max=8)
        if abs(pres.value) > max(1e-8, pres.error_bound):
            raise NormalizationError(
                f"potential has pressure {pres.value:.3e}; normalize it first")
        self.system = system
        self.potential = potential
        if policy is None:
            # keep the default descent above the width floor
            policy = DepthPolicy(max_depth=min(60, max_safe_depth(system)))
        self.policy = policy
        self._domain = system.domain
        self._coeffs = [mp.coefficients() for mp in system.maps]
        self._m = system.alphabet_size
        # any potential reading one symbol has constant child splits
        self._const_conds: tuple[float, ...] | None = None
        if effective_range(system, potential) == 1:
            table = range_table(system, potential, 1)
            e = np.exp(table - table.max())
            self._const_conds = tuple(float(v) for v in e / e.sum())

    def _conds(self, word: tuple[int, ...]) -> tuple[float, ...]:
        if self._const_conds is not None:
            return self._const_conds
        vals = [self.potential.block_sum(PeriodicWord(Word(word + (j,))))
                for j in range(self._m)]
        vmax = max(vals)
        es = [math.exp(v - vmax) for v in vals]
        tot = sum(es)
        return tuple(e / tot for e in es)

    def _descend(self, x: float) -> tuple[float, float]:
        lo, hi = self._domain
        if x < lo:
            return 0.0, 0.0
        if x >= hi:
            return 1.0, 0.0
        coeffs = self._coeffs
        m = self._m
        mass_tol = self.policy.mass_tol
        max_depth = self.policy.max_depth
        acc = 0.0
        mass = 1.0
        word: tuple[int, ...] = ()
        a_, b_, c_, d_ = 1.0, 0.0, 0.0, 1.0
        depth = 0
        while True:
            if mass < mass_tol or depth >= max_depth:
                return acc, mass
            conds = self._conds(word)
            chosen = -1
            kids = []
            for (ka, kb, kc, kd) in coeffs:
                na = a_ * ka + b_ * kc
                nb = a_ * kb + b_ * kd
                nc = c_ * ka + d_ * kc
                nd = c_ * kb + d_ * kd
                l_j = (na * lo + nb) / (nc * lo + nd)
                h_j = (na * hi + nb) / (nc * hi + nd)
                kids.append((l_j, h_j, na, nb, nc, nd))
                if l_j <= x <= h_j:
                    chosen = len(kids) - 1
            if chosen < 0:
                # x sits in a gap: everything to the left is exact
                for j in range(m):
                    if kids[j][1] <= x:
                        acc += mass * conds[j]
                return acc, 0.0
            l_j, h_j, na, nb, nc, nd = kids[chosen]
            if x == l_j:
                for j in range(chosen):
                    acc += mass * conds[j]
                return acc, 0.0
            if x == h_j:
                for j in range(chosen + 1):
                    acc += mass * conds[j]
                return acc, 0.0
            if h_j - l_j < WIDTH_FLOOR:
                raise PrecisionError(
                    f"cylinder width {h_j - l_j:.3e} under the precision floor "
                    f"at depth {depth + 1}")
            for j in range(chosen):
                acc += mass * conds[j]
            mass *= conds[chosen]
            a_, b_, c_, d_ = na, nb, nc, nd
            word = word + (chosen,)
            depth += 1

    def cdf(self, x: float) -> CdfValue:
        value, err = self._descend(float(x))
        return CdfValue(value=value, error_bound=err)

    def cdf_many(self, xs) -> tuple[np.ndarray, np.ndarray]:
        values = np.empty(len(xs))
        errors = np.empty(len(xs))
        descend = self._descend
        for i, x in enumerate(xs):
            values[i], errors[i] = descend(float(x))
        return values, errors


def deep_policy(ifs: IfsSystem) -> DepthPolicy:
    """Descend to the precision floor; for point studies near coded points."""
    return DepthPolicy(max_depth=max_safe_depth(ifs), mass_tol=0.0)


def cdf_eval(F: DistributionFunction, x: float) -> CdfValue:
    return F.cdf(x)


def measure_ball(F: DistributionFunction, t0: float, r: float) -> CdfValue:
    """mu(B(t0, r)) as a difference of two cdf values."""
    if r <= 0:
        raise ValueError("radius must be positive")
    hi = F.cdf(t0 + r)
    lo = F.cdf(t0 - r)
    return CdfValue(value=max(0.0, hi.value - lo.value),
                    error_bound=hi.error_bound + lo.error_bound)


@dataclass(frozen=True)
class Scales:
    """Radii base**(-j) for j = j_min..j_max."""

    base: float
    j_min: int = 1
    j_max: int = 20

    def __post_init__(self):
        if self.base <= 1.0:
            raise ValueError("base must exceed 1")
        if self.j_min >= self.j_max:
            raise ValueError("empty scale range")


def default_scale_base(ifs: IfsSystem) -> float:
    """Match sampling radii to cylinder scales where the geometry allows.

    Affine systems use 1/r_max snapped to the nearest integer base when
    close (3 for the middle-thirds constructions); anything else falls
    back to 2.
    """
    if ifs.is_affine():
        b = 1.0 / ifs.r_max
        rb = round(b)
        if rb > 1 and abs(b - rb) < 0.25:
            return float(rb)
        return b
    return 2.0


@dataclass(frozen=True)
class HolderEstimate:
    t0: float
    exponent: float
    scale_pairs: tuple[tuple[float, float], ...]
    method: str


_WINDOW = 5


def _window_slope(pairs) -> float:
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    xm = sum(xs) / len(xs)
    ym = sum(ys) / len(ys)
    num = sum((x - xm) * (y - ym) for x, y in zip(xs, ys))
    den = sum((x - xm) ** 2 for x in xs)
    return num / den


def holder_exponent_estimate(F: DistributionFunction, t0: float,
                             scales: Scales | None = None,
                             method: str = "regression_min") -> HolderEstimate:
    """Liminf of log mu(B(t0, r)) / log r over sampled radii.

    Radii where the ball mass is within a factor 10 of its own error
    bound are skipped.  regression_min takes the minimum least-squares
    slope over sliding windows of 5 scales, which cancels the additive
    constants that bias the raw ratio; running_min is the raw ratio
    minimum for comparison.
    """
    if method not in ("regression_min", "running_min"):
        raise ValueError(f"unknown method {method!r}")
    if scales is None:
        scales = Scales(base=default_scale_base(F.system))
    pairs = []
    for j in range(scales.j_min, scales.j_max + 1):
        r = scales.base ** (-j)
        mb = measure_ball(F, t0, r)
        if mb.value <= 0.0 or mb.value < 10.0 * mb.error_bound:
            continue
        pairs.append((math.log(r), math.log(mb.value)))
    if len(pairs) < _WINDOW:
        raise ScaleError(f"only {len(pairs)} usable scales, need {_WINDOW}")
    if method == "running_min":
        exponent = min(y / x for x, y in pairs)
    else:
        exponent = min(_window_slope(pairs[i:i + _WINDOW])
                       for i in range(len(pairs) - _WINDOW + 1))
    return HolderEstimate(t0=t0, exponent=max(0.0, exponent),
                          scale_pairs=tuple(pairs), method=method)


def exact_exponent_at_coded_point(ifs: IfsSystem, psi: Potential,
                                  w: PeriodicWord) -> float:
    """Cylinder-scale exponent S_l psi / S_l phi at the coded point of w."""
    from .symbolic import ergodic_sum
    ell = w.period_length
    phi = GeometricPotential(ifs)
    return ergodic_sum(psi, w, ell) / ergodic_sum(phi, w, ell)


@dataclass(frozen=True)
class CoarseBin:
    alpha_center: float
    count: int
    f_alpha: float


@dataclass(frozen=True)
class CoarseSpectrum:
    delta: float
    bin_width: float
    bins: tuple[CoarseBin, ...]
    kept_mass: float


def coarse_spectrum(F: DistributionFunction, delta_list,
                    alpha_bin_width: float = 0.2) -> list[CoarseSpectrum]:
    """Box-counting spectra: histogram coarse exponents log mu(box)/log delta.

    Boxes whose mass is below 10x its error bound are excluded; each
    occupied bin reports f = log(count)/(-log delta).
    """
    if alpha_bin_width <= 0:
        raise ValueError("alpha_bin_width must be positive")
    lo, hi = F.system.domain
    diam = hi - lo
    out = []
    for delta in delta_list:
        d = float(delta)
        if not 0.0 < d < diam:
            raise DomainError(f"delta {d} outside (0, {diam})")
        n = int(math.ceil(diam / d))
        edges = lo + d * np.arange(n + 1)
        edges[-1] = hi
        values, errors = F.cdf_many(edges)
        masses = np.diff(values)
        errs = errors[:-1] + errors[1:]
        keep = (masses > 0.0) & (masses >= 10.0 * errs)
        alphas = np.log(masses[keep]) / math.log(d)
        idx = np.floor(alphas / alpha_bin_width).astype(int)
        bins = []
        for b in sorted(set(int(v) for v in idx)):
            count = int(np.sum(idx == b))
            bins.append(CoarseBin(
                alpha_center=(b + 0.5) * alpha_bin_width,
                count=count,
                f_alpha=math.log(count) / (-math.log(d))))
        kept = float(masses[keep].sum())
        if kept > 1.0 + 1e-9:
            raise PrecisionError(f"kept box masses sum to {kept} > 1")
        out.append(CoarseSpectrum(delta=d, bin_width=alpha_bin_width,
                                  bins=tuple(bins), kept_mass=kept))
    return out
