"""Quantized symmetric L-densities on a uniform grid.

The basic object of density evolution for BMS channels: the distribution of
the log-likelihood ratio y = ln p(Y|X=1)/p(Y|X=-1) conditioned on X=1,
quantized to a uniform grid of bin centers

    y_k = (k - bins/2) * delta,   k = 0 .. bins-1,   delta = 2*Y/bins,

plus a separate point mass at +infinity ("perfect knowledge").  A density is
symmetric when a(-y) = a(y) e^{-y}; constructors and convolutions project
their output back onto that cone.

Channel constructors: BEC(eps), BSC(p), BAWGNC(sigma) (L-density is Gaussian
with mean 2/sigma^2 and variance 4/sigma^2).  Linear functionals: entropy
H(a) = int a(y) log2(1+e^{-y}) dy, Battacharyya B(a) = int a(y) e^{-y/2} dy,
error probability E(a) = 1/2 int a(y) e^{-(y/2+|y/2|)} dy, and the |D|-domain
moments m_k = int |D|-density * z^{2k} dz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

LN2 = math.log(2.0)


class DegreeError(ValueError):
    """Raised for unusable (l, r) degree pairs."""


class GridMismatchError(ValueError):
    """Raised when an operation mixes densities living on different grids."""


class FamilyRangeError(ValueError):
    """Raised when a channel family cannot reach the requested entropy/param."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform L-domain quantization: bins centers on [-Y, Y), plus a +inf atom.

    Note: centers are (k - bins/2)*delta so that 0 is an exact bin center
    (Delta_0 is representable exactly and the grid is closed under addition).
    """

    half_range: float = 30.0
    bins: int = 4096

    def __post_init__(self):
        if not (self.half_range > 0):
            raise ValueError("half_range must be positive")
        if self.bins < 16 or self.bins % 2 != 0:
            raise ValueError("bins must be an even integer >= 16")

    @property
    def delta(self) -> float:
        return 2.0 * self.half_range / self.bins

    @property
    def mid(self) -> int:
        return self.bins // 2

    def centers(self) -> np.ndarray:
        return _grid_tables(self)["centers"]


# Per-grid cached arrays (kernel vectors etc.).  Keyed by (half_range, bins).
_GRID_TABLES: dict = {}


def _grid_tables(grid: GridSpec) -> dict:
    key = (grid.half_range, grid.bins)
    tab = _GRID_TABLES.get(key)
    if tab is None:
        n, mid = grid.bins, grid.mid
        y = (np.arange(n) - mid) * grid.delta
        ypos = np.arange(mid + 1) * grid.delta  # magnitudes 0..Y
        tab = {
            "centers": y,
            # log2(1 + e^{-y}), computed stably
            "ent_kernel": np.logaddexp(0.0, -y) / LN2,
            "bat_kernel": np.exp(-y / 2.0),
            "err_kernel": 0.5 * np.exp(-(y / 2.0 + np.abs(y) / 2.0)),
            # symmetry weights for magnitude j>=1: fraction of pair mass on +y
            "sym_w": 1.0 / (1.0 + np.exp(-ypos)),
            # |D| support: z_j = tanh(j*delta/2) for j=0..mid, then the point 1
            "absd_z": np.tanh(ypos / 2.0),
        }
        for v in tab.values():
            v.setflags(write=False)
        _GRID_TABLES[key] = tab
    return tab


@dataclass(frozen=True)
class DegreePair:
    """(l, r)-regular ensemble: variable degree l, check degree r, l < r."""

    l: int
    r: int

    def __post_init__(self):
        if not (2 <= self.l < self.r):
            raise DegreeError("require 2 <= l < r")
        if self.l < 3:
            import warnings
            warnings.warn("l=2 is outside the analyzed regime (3 <= l <= r)",
                          stacklevel=2)

    @property
    def design_rate(self) -> float:
        return 1.0 - self.l / self.r


@dataclass(frozen=True)
class Density:
    """Symmetric L-density: pmf over grid centers plus an atom at +infinity."""

    grid: GridSpec
    pmf: np.ndarray
    inf_mass: float = 0.0

    def __post_init__(self):
        self.pmf.setflags(write=False)

    def total_mass(self) -> float:
        return float(self.pmf.sum() + self.inf_mass)


def _project_symmetric(grid: GridSpec, pmf: np.ndarray) -> np.ndarray:
    """Project a pmf onto the symmetric cone a(-y) = a(y) e^{-y}.

    Pair masses at +/-y are pooled and redistributed in the exact symmetric
    ratio; mass is preserved.  The 0 bin is untouched; the lone -Y bin has no
    positive partner and is left as-is (its mass is ~e^{-Y} in practice).
    """
    mid = grid.bins // 2
    w = _grid_tables(grid)["sym_w"]
    out = pmf.copy()
    pos = pmf[mid + 1:]                      # y = delta .. Y-delta
    neg = pmf[mid - 1:0:-1]                  # matching -y
    m = pos + neg
    out[mid + 1:] = m * w[1:mid]
    out[mid - 1:0:-1] = m * (1.0 - w[1:mid])
    return out


def make_density(grid: GridSpec, pmf: np.ndarray, inf_mass: float,
                 project: bool = True) -> Density:
    """Assemble a Density: clip fp-noise negatives, symmetrize, renormalize."""
    pmf = np.asarray(pmf, dtype=np.float64)
    if pmf.shape != (grid.bins,):
        raise ValueError("pmf length does not match grid")
    pmf = np.where(pmf < 0.0, 0.0, pmf)
    inf_mass = max(float(inf_mass), 0.0)
    if project:
        pmf = _project_symmetric(grid, pmf)
    total = pmf.sum() + inf_mass
    if not (abs(total - 1.0) < 1e-6):
        raise ValueError(f"density mass {total} too far from 1")
    if total != 1.0:
        pmf = pmf / total
        inf_mass /= total
    return Density(grid, pmf, inf_mass)


def delta_zero(grid: GridSpec) -> Density:
    pmf = np.zeros(grid.bins)
    pmf[grid.mid] = 1.0
    return Density(grid, pmf, 0.0)


def delta_inf(grid: GridSpec) -> Density:
    return Density(grid, np.zeros(grid.bins), 1.0)


def _deposit_atom(grid: GridSpec, pmf: np.ndarray, y: float, mass: float) -> float:
    """Deposit `mass` at L-value y with a two-bin linear (mean-preserving)
    split.  Returns the part that overflows past +Y (to become inf_mass);
    mass below -Y is clamped into the leftmost bin."""
    if mass == 0.0:
        return 0.0
    n, mid = grid.bins, grid.mid
    f = y / grid.delta + mid
    if f >= n - 1:
        if f >= n:                       # beyond the virtual +Y slot
            return mass
        w = f - (n - 1)                  # split between last center and +Y
        pmf[n - 1] += mass * (1.0 - w)
        return mass * w
    if f <= 0.0:
        pmf[0] += mass
        return 0.0
    lo = int(f)
    w = f - lo
    pmf[lo] += mass * (1.0 - w)
    pmf[lo + 1] += mass * w
    return 0.0


def make_bec(eps: float, grid: GridSpec) -> Density:
    """BEC(eps) as an L-density: eps * Delta_0 + (1-eps) * Delta_{+inf}."""
    if not (0.0 <= eps <= 1.0):
        raise ValueError("eps must be in [0, 1]")
    pmf = np.zeros(grid.bins)
    pmf[grid.mid] = eps
    return Density(grid, pmf, 1.0 - eps)


def make_bsc(p: float, grid: GridSpec) -> Density:
    """BSC(p): atoms of mass 1-p at +mu and p at -mu, mu = ln((1-p)/p)."""
    if not (0.0 < p <= 0.5):
        raise ValueError("p must be in (0, 0.5]")
    mu = math.log((1.0 - p) / p)
    pmf = np.zeros(grid.bins)
    inf = _deposit_atom(grid, pmf, mu, 1.0 - p)
    inf += _deposit_atom(grid, pmf, -mu, p)
    return make_density(grid, pmf, inf)


def make_bawgnc(sigma: float, grid: GridSpec) -> Density:
    """BAWGNC(sigma): Gaussian L-density, mean 2/sigma^2, variance 4/sigma^2,
    integrated over each bin; upper tail folds into the +inf atom, lower tail
    into the leftmost bin (then re-symmetrized)."""
    if not (sigma > 0):
        raise ValueError("sigma must be positive")
    m = 2.0 / (sigma * sigma)
    sd = 2.0 / sigma
    n, mid = grid.bins, grid.mid
    # bin k covers [y_k - delta/2, y_k + delta/2]
    edges = (np.arange(n + 1) - mid - 0.5) * grid.delta
    cdf = ndtr((edges - m) / sd)
    pmf = np.diff(cdf)
    pmf[0] += cdf[0]              # lower tail
    inf = 1.0 - cdf[-1]           # upper tail
    return make_density(grid, pmf, inf)


def _check_same_grid(a: Density, b: Density) -> None:
    if a.grid != b.grid:
        raise GridMismatchError("densities live on different grids")


def entropy(d: Density) -> float:
    """H(a) = int a(y) log2(1+e^{-y}) dy; the +inf atom contributes 0."""
    return float(d.pmf @ _grid_tables(d.grid)["ent_kernel"])


def battacharyya(d: Density) -> float:
    """B(a) = int a(y) e^{-y/2} dy."""
    return float(d.pmf @ _grid_tables(d.grid)["bat_kernel"])


def error_prob(d: Density) -> float:
    """E(a) = 1/2 int a(y) e^{-(y/2+|y/2|)} dy (mass at 0 counts 1/2)."""
    return float(d.pmf @ _grid_tables(d.grid)["err_kernel"])


def _absd_masses(d: Density) -> np.ndarray:
    """Mass per |D| magnitude j=0..mid (z_j = tanh(j*delta/2)); the lone -Y
    bin contributes to j=mid.  Does not include the inf atom (z=1)."""
    mid = d.grid.mid
    m = np.empty(mid + 1)
    m[0] = d.pmf[mid]
    m[1:mid] = d.pmf[mid + 1:] + d.pmf[mid - 1:0:-1]
    m[mid] = d.pmf[0]
    return m


@dataclass(frozen=True)
class AbsDRepr:
    """|D|-domain cdf: support points in [0,1] with cumulative masses."""

    support: np.ndarray
    cdf: np.ndarray


def to_absD(d: Density) -> AbsDRepr:
    """|D| point of L-value y is |tanh(y/2)|; +/-y masses pool; inf -> 1."""
    tab = _grid_tables(d.grid)
    support = np.concatenate([tab["absd_z"], [1.0]])
    masses = np.concatenate([_absd_masses(d), [d.inf_mass]])
    return AbsDRepr(support, np.cumsum(masses))


def moment(d: Density, k: int) -> float:
    """m_{a,k} = int |D|-density * z^{2k} dz (inf atom contributes 1^{2k})."""
    if k < 1:
        raise ValueError("k must be >= 1")
    z = _grid_tables(d.grid)["absd_z"]
    return float(_absd_masses(d) @ z ** (2 * k) + d.inf_mass)


def convex_combine(alpha: float, a: Density, b: Density) -> Density:
    """alpha*a + (1-alpha)*b, bin-wise; functionals are exactly linear."""
    if not (0.0 <= alpha <= 1.0):
        raise ValueError("alpha must be in [0, 1]")
    _check_same_grid(a, b)
    return Density(a.grid, alpha * a.pmf + (1.0 - alpha) * b.pmf,
                   alpha * a.inf_mass + (1.0 - alpha) * b.inf_mass)


def _tail_integrals(r: AbsDRepr) -> tuple[np.ndarray, np.ndarray]:
    """At each support point z_i: T_i = int_{z_i}^1 cdf(x) dx for the
    piecewise-constant cdf (constant r.cdf[i] on [z_i, z_{i+1}))."""
    z = np.concatenate([r.support, [1.0]])
    seg = r.cdf * np.diff(z)
    T = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    return r.support, T[:-1]


def _tail_at(z_pts: np.ndarray, r: AbsDRepr) -> np.ndarray:
    """int_z^1 cdf for arbitrary query points z_pts."""
    s, T = _tail_integrals(r)
    idx = np.searchsorted(s, z_pts, side="right") - 1
    out = np.empty_like(z_pts, dtype=float)
    inside = idx >= 0
    i = idx[inside]
    # subtract the already-passed part of segment i
    out[inside] = T[i] - r.cdf[i] * (z_pts[inside] - s[i])
    # left of the first support point the cdf is 0, so the tail is just T[0]
    out[~inside] = T[0]
    return out


def is_degraded(a: Density, b: Density, tol: float = 1e-9) -> bool:
    """True iff b is degraded w.r.t. a (a 'better'):
    int_z^1 |D|-cdf_a <= int_z^1 |D|-cdf_b + tol for all z."""
    ra, rb = to_absD(a), to_absD(b)
    if a.grid == b.grid:
        _, Ta = _tail_integrals(ra)
        _, Tb = _tail_integrals(rb)
        return bool(np.all(Ta <= Tb + tol))
    z = np.union1d(ra.support, rb.support)
    return bool(np.all(_tail_at(z, ra) <= _tail_at(z, rb) + tol))


def symmetry_residual(d: Density) -> float:
    """Sum over positive bins of |a(-y) - a(y) e^{-y}| (0 for exact symmetry)."""
    mid = d.grid.mid
    y = _grid_tables(d.grid)["centers"][mid + 1:]
    pos = d.pmf[mid + 1:]
    neg = d.pmf[mid - 1:0:-1]
    return float(np.abs(neg - pos * np.exp(-y)).sum())


# ---------------------------------------------------------------------------
# Channel families


@dataclass(frozen=True)
class ChannelFamily:
    """Degradation-ordered, complete one-parameter family of BMS channels.

    entropy_of_param is strictly increasing from ~0 at param_min to ~1 at
    param_max (exact endpoints for BEC; within discretization for the rest).
    """

    kind: str                    # 'bec' | 'bsc' | 'bawgnc'
    grid: GridSpec
    param_min: float
    param_max: float

    def make(self, param: float) -> Density:
        if self.kind == "bec":
            return make_bec(param, self.grid)
        if self.kind == "bsc":
            return make_bsc(param, self.grid)
        if self.kind == "bawgnc":
            return make_bawgnc(param, self.grid)
        raise ValueError(f"unknown family kind {self.kind!r}")

    def entropy_of_param(self, param: float) -> float:
        if self.kind == "bec":
            return param
        return entropy(self.make(param))


def make_family(kind: str, grid: GridSpec) -> ChannelFamily:
    kind = kind.lower()
    if kind == "bec":
        return ChannelFamily("bec", grid, 0.0, 1.0)
    if kind == "bsc":
        return ChannelFamily("bsc", grid, 1e-12, 0.5)
    if kind == "bawgnc":
        return ChannelFamily("bawgnc", grid, 1e-2, 1e5)
    raise ValueError(f"unknown channel kind {kind!r} (want bec|bsc|bawgnc)")


def param_from_entropy(fam: ChannelFamily, h: float, tol: float = 1e-10) -> float:
    """Invert entropy_of_param by bisection: |H(c_param) - h| <= tol."""
    if fam.kind == "bec":
        if not (0.0 <= h <= 1.0):
            raise FamilyRangeError("BEC entropy must be in [0, 1]")
        return h
    lo, hi = fam.param_min, fam.param_max
    h_lo, h_hi = fam.entropy_of_param(lo), fam.entropy_of_param(hi)
    if h < h_lo - tol or h > h_hi + tol:
        raise FamilyRangeError(
            f"{fam.kind} family spans entropies [{h_lo:.3g}, {h_hi:.6g}], "
            f"requested {h}")
    for _ in range(200):
        m = 0.5 * (lo + hi)
        hm = fam.entropy_of_param(m)
        if abs(hm - h) <= tol or hi - lo < 1e-14 * max(1.0, abs(m)):
            return m
        if hm < h:
            lo = m
        else:
            hi = m
    return 0.5 * (lo + hi)


def channel_at_entropy(fam: ChannelFamily, h: float, tol: float = 1e-10) -> Density:
    """The family element of entropy h (within tol)."""
    return fam.make(param_from_entropy(fam, h, tol))
