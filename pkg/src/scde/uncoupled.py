"""Forward density evolution, BP and area thresholds, fixed-entropy DE,
GEXIT curves, and the scalar BEC toolkit for (l,r)-regular ensembles.

Forward DE iterates x <- c ⊛ (x^{⊡(r-1)})^{⊛(l-1)} from Delta_0.  "Decoded"
means the Battacharyya parameter fell below conv_batta (any nontrivial fixed
point has B >= (r-1)^{-(l-1)/(l-2)}, many orders of magnitude larger);
"FixedPoint" means the per-iteration Battacharyya change stalled while B is
still large.

The BEC admits the scalar recursion x <- eps(1-(1-x)^{r-1})^{l-1}; it serves
both as an oracle for the density pipeline and, via the extremes of
information combining, as a certified early-exit test: B_{l+1} <=
B(c)(1-(1-B_l)^{r-1})^{l-1}, so once the scalar recursion started at the
current B converges to 0 the density iteration is guaranteed to decode.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .density import (ChannelFamily, DegreePair, Density, FamilyRangeError,
                      battacharyya, channel_at_entropy, delta_zero, entropy,
                      param_from_entropy)
from .convolve import check_power, de_step, var_conv, var_power
from .metric import wasserstein


class DeStatus(enum.Enum):
    DECODED = "decoded"
    FIXED_POINT = "fixed_point"
    MAX_ITER = "max_iter"


@dataclass(frozen=True)
class DeConfig:
    """Numerical knobs for DE runs and threshold bisections."""

    max_iter: int = 2000
    conv_batta: float = 1e-7         # B below this counts as decoded
    stall_delta: float = 1e-10       # per-iteration |dB| declaring a FP
    bisect_tol: float = 1e-4         # on channel entropy
    inner_entropy_tol: float = 1e-8  # fixed-entropy inner solve
    fp_wasserstein_tol: float = 1e-6 # fixed-entropy outer stall
    coupled_stall: float = 1e-7      # max per-cell Wasserstein change / sweep
    early_exit: bool = True          # scalar-certified early decode

    def __post_init__(self):
        if min(self.max_iter, self.conv_batta, self.stall_delta,
               self.bisect_tol) <= 0:
            raise ValueError("DeConfig fields must be positive")


def bisect(f, lo: float, hi: float, tol: float, max_steps: int = 200) -> float:
    """Bracketed bisection for the sign change of f on [lo, hi]."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ValueError("bisect: no sign change on bracket")
    for _ in range(max_steps):
        m = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return m
        fm = f(m)
        if fm == 0.0:
            return m
        if fm * flo < 0:
            hi = m
        else:
            lo, flo = m, fm
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# scalar BEC toolkit


def bec_g(dd: DegreePair, x):
    return (1.0 - (1.0 - x) ** (dd.r - 1)) ** (dd.l - 1)


def bec_h(dd: DegreePair, eps: float, x: float) -> float:
    """h(x) = eps(1-(1-x)^{r-1})^{l-1} - x; fixed points of the BEC recursion."""
    return eps * bec_g(dd, x) - x


def _bec_hprime(dd: DegreePair, eps: float, x: float) -> float:
    l, r = dd.l, dd.r
    return eps * (l - 1) * (1.0 - (1.0 - x) ** (r - 1)) ** (l - 2) \
        * (r - 1) * (1.0 - x) ** (r - 2) - 1.0


def bec_bp_threshold(dd: DegreePair, tol: float = 1e-12) -> float:
    """eps^BP = min over x in (0,1] of x / (1-(1-x)^{r-1})^{l-1}."""
    if dd.l >= dd.r:
        raise ValueError("require l < r")
    phi = lambda x: x / bec_g(dd, x)
    xs = np.linspace(1e-9, 1.0, 4001)
    vals = phi(xs)
    i = int(np.argmin(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    # golden-section refine of the unimodal minimum
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = phi(c), phi(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = phi(d)
    return float(phi(0.5 * (a + b)))


@dataclass(frozen=True)
class BecRoots:
    x_u: float | None     # unstable nonzero root of h
    x_s: float | None     # stable (largest) root
    x_star: float | None  # root of h' below x_u
    kappa_star: float


def bec_roots(dd: DegreePair, eps: float, tol: float = 1e-12) -> BecRoots:
    """Roots of h(x)=0 in (0,1] plus the kappa_* constant:
    kappa_* = min{-h'(0), -h(x_*)/x_*}."""
    xs = np.linspace(0.0, 1.0, 8193)[1:]
    hv = eps * bec_g(dd, xs) - xs
    sign = np.sign(hv)
    crossings = np.nonzero(np.diff(sign) != 0)[0]
    roots = [bisect(lambda x: bec_h(dd, eps, x), xs[i], xs[i + 1], tol)
             for i in crossings]
    # discard the trivial root at 0 if the grid caught it
    roots = [r_ for r_ in roots if r_ > 1e-8]
    x_u = roots[0] if roots else None
    x_s = roots[-1] if roots else None
    minus_hp0 = -_bec_hprime(dd, eps, 0.0)     # = 1 for l >= 3
    x_star = None
    kappa = minus_hp0
    hi = x_u if x_u is not None else 1.0
    hp = lambda x: _bec_hprime(dd, eps, x)
    # h'(0) < 0; look for the first upcrossing of h' below x_u
    zs = np.linspace(0.0, hi, 2049)
    hpv = np.array([hp(z) for z in zs])
    up = np.nonzero((hpv[:-1] < 0) & (hpv[1:] >= 0))[0]
    if up.size:
        x_star = bisect(hp, zs[up[0]], zs[up[0] + 1], tol)
        kappa = min(minus_hp0, -bec_h(dd, eps, x_star) / x_star)
    return BecRoots(x_u, x_s, x_star, float(kappa))


def bec_forward_fp(dd: DegreePair, eps: float) -> float:
    """Limit of the scalar BEC recursion started at x=eps (0 if decodable)."""
    x = eps
    for _ in range(200000):
        x_next = eps * bec_g(dd, x)
        if abs(x_next - x) < 1e-15:
            return x_next
        x = x_next
        if x < 1e-13:
            return 0.0
    return x


def bec_area(dd: DegreePair, x: float) -> float:
    """Scalar BEC evaluation of the GEXIT-area functional A at erasure x."""
    l, r = dd.l, dd.r
    return x + (l - 1 - l / r) * (1.0 - (1.0 - x) ** r) \
        - (l - 1) * (1.0 - (1.0 - x) ** (r - 1))


def bec_area_threshold(dd: DegreePair, tol: float = 1e-10) -> float:
    """Scalar BEC area threshold: sup{eps: A(forward FP at eps) <= 0}."""
    def pred(eps):
        return bec_area(dd, bec_forward_fp(dd, eps)) <= 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        m = 0.5 * (lo + hi)
        if pred(m):
            lo = m
        else:
            hi = m
    return 0.5 * (lo + hi)


def bec_eps_of_x(dd: DegreePair, x: float) -> float:
    """Channel erasure that makes x a DE fixed point: eps(x) = x/g(x)."""
    return x / bec_g(dd, x)


def _scalar_decodes(dd: DegreePair, eps: float, x0: float,
                    floor: float = 1e-12, max_iter: int = 100000) -> bool:
    """Does the dominating scalar recursion from x0 converge to 0?"""
    x = x0
    for _ in range(max_iter):
        x_next = eps * bec_g(dd, x)
        if x_next < floor:
            return True
        if x_next >= x - 1e-16:
            return False
        x = x_next
    return False


# ---------------------------------------------------------------------------
# forward DE and thresholds


def nontrivial_fp_batta_bound(dd: DegreePair) -> float:
    """x_u(1) >= (r-1)^{-(l-1)/(l-2)}: lower bound on B of any nontrivial FP."""
    if dd.l == 2:
        return 0.0
    return (dd.r - 1) ** (-(dd.l - 1) / (dd.l - 2))


def forward_de(dd: DegreePair, c: Density, cfg: DeConfig = DeConfig()
               ) -> tuple[Density, DeStatus, int]:
    """Run DE from Delta_0; returns (last iterate, status, iterations)."""
    x = delta_zero(c.grid)
    b_prev = battacharyya(x)
    bc = battacharyya(c)
    early_b = 0.5 * nontrivial_fp_batta_bound(dd)
    for it in range(1, cfg.max_iter + 1):
        x = de_step(dd, c, x)
        b = battacharyya(x)
        if b < cfg.conv_batta:
            return x, DeStatus.DECODED, it
        if cfg.early_exit and b < early_b and _scalar_decodes(dd, bc, b):
            return x, DeStatus.DECODED, it
        if abs(b - b_prev) < cfg.stall_delta:
            return x, DeStatus.FIXED_POINT, it
        b_prev = b
    return x, DeStatus.MAX_ITER, cfg.max_iter


def bp_threshold(dd: DegreePair, fam: ChannelFamily,
                 cfg: DeConfig = DeConfig(), details: dict | None = None) -> float:
    """Largest channel entropy at which forward DE decodes, by bisection.
    MaxIter probes count as not-decoded (conservative)."""
    lo, hi = 0.0, 1.0
    probes = total_iters = 0
    while hi - lo > cfg.bisect_tol:
        m = 0.5 * (lo + hi)
        _, status, iters = forward_de(dd, fam.make(param_from_entropy(fam, m)), cfg)
        probes += 1
        total_iters += iters
        if status is DeStatus.DECODED:
            lo = m
        else:
            hi = m
    if details is not None:
        details["probes"] = probes
        details["iterations"] = total_iters
    return 0.5 * (lo + hi)


def area_A(dd: DegreePair, x: Density) -> float:
    """A = H(x) + (l-1-l/r) H(x^{⊡r}) - (l-1) H(x^{⊡(r-1)})."""
    from .convolve import check_conv
    xr1 = check_power(x, dd.r - 1)
    xr = check_conv(xr1, x)
    return entropy(x) + (dd.l - 1 - dd.l / dd.r) * entropy(xr) \
        - (dd.l - 1) * entropy(xr1)


def area_threshold(dd: DegreePair, fam: ChannelFamily,
                   cfg: DeConfig = DeConfig(),
                   bracket: tuple[float, float] | None = None,
                   details: dict | None = None) -> float:
    """sup{h: A(forward-DE FP at c_h) <= 0}; Decoded counts as A <= 0
    (A(Delta_inf) = 0).  Bisection over [0,1] unless a bracket is given."""
    lo, hi = bracket if bracket is not None else (0.0, 1.0)
    probes = total_iters = 0
    while hi - lo > cfg.bisect_tol:
        m = 0.5 * (lo + hi)
        fp, status, iters = forward_de(dd, fam.make(param_from_entropy(fam, m)), cfg)
        probes += 1
        total_iters += iters
        ok = True if status is DeStatus.DECODED else (area_A(dd, fp) <= 0.0)
        if ok:
            lo = m
        else:
            hi = m
    if details is not None:
        details["probes"] = probes
        details["iterations"] = total_iters
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# fixed-entropy DE and GEXIT


class FixedEntropyUndefined(ValueError):
    """No channel in the family can reach the requested fixed-point entropy."""


def _solve_channel_entropy(fam: ChannelFamily, b: Density, target: float,
                           tol: float) -> tuple[Density, float]:
    """Find c in the family with H(c ⊛ b) = target; returns (c, H(c))."""
    lo, hi = fam.param_min, fam.param_max
    c_hi = fam.make(hi)
    top = entropy(var_conv(c_hi, b))
    if top < target - 1e-12:
        raise FixedEntropyUndefined(
            f"H(T_1(a)) = {top:.6f} < target {target:.6f}")
    c_lo = fam.make(lo)
    if entropy(var_conv(c_lo, b)) > target:
        # even the perfect channel overshoots; the FP entropy is not reachable
        raise FixedEntropyUndefined("target below H(b ⊛ c_min)")
    for _ in range(200):
        m = 0.5 * (lo + hi)
        c_m = fam.make(m)
        hm = entropy(var_conv(c_m, b))
        if abs(hm - target) <= tol or hi - lo < 1e-15 * max(1.0, abs(m)):
            return c_m, fam.entropy_of_param(m)
        if hm < target:
            lo = m
        else:
            hi = m
    m = 0.5 * (lo + hi)
    return fam.make(m), fam.entropy_of_param(m)


def fixed_entropy_de(dd: DegreePair, fam: ChannelFamily, target_x: float,
                     cfg: DeConfig = DeConfig()) -> tuple[Density, float]:
    """DE at fixed entropy: iterate a <- c_h ⊛ (a^{⊡(r-1)})^{⊛(l-1)} where h
    is re-solved each step so that H(a) stays at target_x.  Returns the FP
    density and its channel entropy."""
    if not (0.0 < target_x < 1.0):
        raise ValueError("target_x must be in (0, 1)")
    a = delta_zero(fam.grid)
    h = 1.0
    for _ in range(cfg.max_iter):
        b = var_power(check_power(a, dd.r - 1), dd.l - 1)
        c, h = _solve_channel_entropy(fam, b, target_x, cfg.inner_entropy_tol)
        a_next = var_conv(c, b)
        if wasserstein(a_next, a) < cfg.fp_wasserstein_tol:
            return a_next, h
        a = a_next
    return a, h


def gexit_value(fam: ChannelFamily, h: float, z: Density,
                dh: float = 1e-3) -> float:
    """GEXIT value by a finite difference of entropies:
    [H(c_{h+dh} ⊛ z) - H(c_{h-dh} ⊛ z)] / [H(c_{h+dh}) - H(c_{h-dh})]."""
    h_lo = max(h - dh, 0.0)
    h_hi = min(h + dh, 1.0)
    if h_hi <= h_lo:
        raise ValueError("degenerate entropy interval")
    c_lo = channel_at_entropy(fam, h_lo)
    c_hi = channel_at_entropy(fam, h_hi)
    num = entropy(var_conv(c_hi, z)) - entropy(var_conv(c_lo, z))
    den = entropy(c_hi) - entropy(c_lo)
    return float(num / den)


@dataclass(frozen=True)
class GexitPoint:
    channel_entropy: float
    fp_entropy: float
    gexit: float


def gexit_curve(dd: DegreePair, fam: ChannelFamily, x_grid,
                cfg: DeConfig = DeConfig()) -> tuple[list[GexitPoint], list[float]]:
    """One GEXIT point per achievable fixed-point entropy in x_grid; the
    second return value lists the skipped (unachievable) targets."""
    points: list[GexitPoint] = []
    skipped: list[float] = []
    for x in x_grid:
        try:
            a, h = fixed_entropy_de(dd, fam, float(x), cfg)
        except (FixedEntropyUndefined, FamilyRangeError):
            skipped.append(float(x))
            continue
        z = var_power(check_power(a, dd.r - 1), dd.l)
        points.append(GexitPoint(h, entropy(a), gexit_value(fam, h, z)))
    return points, skipped


# ---------------------------------------------------------------------------
# code-entropy functionals


def check_code_entropy(r: int, x: Density) -> float:
    """Normalized entropy of a single parity-check code: r H(x) - H(x^{⊡r})."""
    return r * entropy(x) - entropy(check_power(x, r))


def tree_code_entropy(dd: DegreePair, c: Density, x: Density) -> float:
    """Entropy of the depth-one tree code at messages x and channel c:
    H(x~) + l(r-1)H(x) - H(x~ ⊡ x^{⊡(r-1)}) - (l-1)H(x^{⊡(r-1)}),
    with x~ = c ⊛ (x^{⊡(r-1)})^{⊛(l-1)}."""
    from .convolve import check_conv
    xr1 = check_power(x, dd.r - 1)
    xt = var_conv(c, var_power(xr1, dd.l - 1))
    return entropy(xt) + dd.l * (dd.r - 1) * entropy(x) \
        - entropy(check_conv(xt, xr1)) - (dd.l - 1) * entropy(xr1)
