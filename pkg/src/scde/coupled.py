"""Spatially coupled (l,r,L,w) density evolution.

A constellation is a vector of densities indexed by section.  The coupled DE
update is

    x_i = c ⊛ ((1/w) sum_j ((1/w) sum_k x_{i+j-k})^{⊡(r-1)})^{⊛(l-1)}

with x_i = Delta_{+inf} outside [-L, L] for the two-sided ensemble (perfect
side information at the boundary).  One-sided variants live on [-N, 0] with
Delta_{+inf} to the left and either Delta_0 ("forced") or a copy of x_0
("free") to the right; the circular ensemble works modulo 2L+w with w-1
sections pinned to Delta_{+inf}.

The per-sweep inner averages A_m = (1/w) sum_k x_{m-k} and their check
powers C_m = A_m^{⊡(r-1)} are shared across sections, which is what makes a
sweep affordable: 2L+w check powers instead of (2L+1)*w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import (ChannelFamily, DegreePair, Density, battacharyya,
                      delta_inf, delta_zero, entropy, error_prob,
                      param_from_entropy)
from .convolve import check_power, uniform_mix, var_conv, var_power
from .metric import wasserstein
from .uncoupled import (DeConfig, DeStatus, FixedEntropyUndefined,
                        _scalar_decodes, gexit_value, GexitPoint,
                        nontrivial_fp_batta_bound)

TWO_SIDED = "two_sided"
ONE_SIDED_FORCED = "one_sided_forced"
ONE_SIDED_FREE = "one_sided_free"
CIRCULAR = "circular"
_BOUNDARIES = (TWO_SIDED, ONE_SIDED_FORCED, ONE_SIDED_FREE, CIRCULAR)


@dataclass(frozen=True)
class CoupledParams:
    """(l,r,L,w) ensemble: sections at [-L, L], smoothing window w."""

    dd: DegreePair
    L: int
    w: int
    boundary: str = TWO_SIDED

    def __post_init__(self):
        if self.L < 1 or self.w < 1:
            raise ValueError("require L >= 1 and w >= 1")
        if self.boundary not in _BOUNDARIES:
            raise ValueError(f"unknown boundary {self.boundary!r}")

    @property
    def n_sections(self) -> int:
        if self.boundary == CIRCULAR:
            return 2 * self.L + self.w
        if self.boundary in (ONE_SIDED_FORCED, ONE_SIDED_FREE):
            return self.L + 1          # sections -N..0 with N = L
        return 2 * self.L + 1


@dataclass(frozen=True)
class Constellation:
    params: CoupledParams
    cells: tuple

    def __post_init__(self):
        if len(self.cells) != self.params.n_sections:
            raise ValueError("cell count does not match params/boundary")


def design_rate(p: CoupledParams) -> float:
    """R(l,r,L,w) = (1-l/r) - (l/r)(w+1-2 sum_{i=0}^w (i/w)^r)/(2L+1)."""
    if p.w > p.L:
        raise ValueError("design-rate formula needs w <= L")
    l, r, L, w = p.dd.l, p.dd.r, p.L, p.w
    s = sum((i / w) ** r for i in range(w + 1))
    return (1.0 - l / r) - (l / r) * (w + 1 - 2 * s) / (2 * L + 1)


def uniform_constellation(p: CoupledParams, d: Density) -> Constellation:
    return Constellation(p, tuple([d] * p.n_sections))


def _cell_getter(x: Constellation, grid):
    """Accessor i -> density honoring the boundary convention."""
    p = x.params
    cells = x.cells
    dinf = delta_inf(grid)
    if p.boundary == TWO_SIDED:
        L = p.L

        def get(i):
            return cells[i + L] if -L <= i <= L else dinf
    elif p.boundary == CIRCULAR:
        M = p.n_sections

        def get(i):
            return cells[i % M]
    else:
        N = p.L
        right = delta_zero(grid) if p.boundary == ONE_SIDED_FORCED else cells[-1]

        def get(i):
            if i < -N:
                return dinf
            if i > 0:
                return right
            return cells[i + N]
    return get


def _update_range(p: CoupledParams) -> range:
    """Stored-section indices in ensemble coordinates."""
    if p.boundary == TWO_SIDED:
        return range(-p.L, p.L + 1)
    if p.boundary == CIRCULAR:
        return range(0, p.n_sections)
    return range(-p.L, 1)


def _section_update(p, c, C_of, i):
    """x_i = c ⊛ ((1/w) sum_j C_{i+j})^{⊛(l-1)} from cached check powers."""
    mix = uniform_mix([C_of(i + j) for j in range(p.w)])
    return var_conv(c, var_power(mix, p.dd.l - 1))


def _sweep(p: CoupledParams, c: Density, x: Constellation,
           subset=None, pinned=()) -> Constellation:
    """One DE sweep; `subset` restricts which stored sections update
    (Jacobi style, all reads from the incoming constellation)."""
    grid = c.grid
    get = _cell_getter(x, grid)
    cache: dict = {}

    def C_of(m):
        C = cache.get(m)
        if C is None:
            A = uniform_mix([get(m - k) for k in range(p.w)])
            C = check_power(A, p.dd.r - 1)
            cache[m] = C
        return C

    rng = _update_range(p)
    new = list(x.cells)
    for pos, i in enumerate(rng):
        if subset is not None and pos not in subset:
            continue
        if pos in pinned:
            new[pos] = delta_inf(grid)
            continue
        new[pos] = _section_update(p, c, C_of, i)
    return Constellation(p, tuple(new))


def coupled_de_step(p: CoupledParams, c: Density, x: Constellation) -> Constellation:
    """Parallel update of every section (pinned handling for circular is done
    by circular_de, which owns the pin positions)."""
    return _sweep(p, c, x)


def max_batta(x: Constellation) -> float:
    return max(battacharyya(d) for d in x.cells)


def coupled_forward_de(p: CoupledParams, c: Density, schedule="parallel",
                       cfg: DeConfig = DeConfig(), pinned=()
                       ) -> tuple[Constellation, DeStatus, int]:
    """Coupled forward DE from the all-Delta_0 constellation.

    schedule: "parallel" or ("random", seed).  The random schedule updates a
    uniformly random nonempty subset each sweep but forces every section at
    least once every 3 sweeps (an admissible schedule); reads always come
    from the sweep-start constellation, so runs are reproducible by seed.
    """
    grid = c.grid
    n = p.n_sections
    start = [delta_zero(grid)] * n
    for pos in pinned:
        start[pos] = delta_inf(grid)
    x = Constellation(p, tuple(start))
    rng = None
    if schedule != "parallel":
        kind, seed = schedule
        if kind != "random":
            raise ValueError("schedule must be 'parallel' or ('random', seed)")
        rng = np.random.default_rng(seed)
    stale = np.zeros(n, dtype=int)
    bc = battacharyya(c)
    early_b = 0.5 * nontrivial_fp_batta_bound(p.dd)
    recent = []          # per-sweep max changes (rolling window of 3)
    for sweep in range(1, cfg.max_iter + 1):
        if rng is None:
            subset = None
        else:
            pick = rng.random(n) < 0.5
            stale += 1
            pick |= stale >= 3
            if not pick.any():
                pick[rng.integers(n)] = True
            stale[pick] = 0
            subset = set(np.nonzero(pick)[0].tolist())
        x_new = _sweep(p, c, x, subset=subset, pinned=pinned)
        b = max_batta(x_new)
        if b < cfg.conv_batta:
            return x_new, DeStatus.DECODED, sweep
        if cfg.early_exit and b < early_b and _scalar_decodes(p.dd, bc, b):
            return x_new, DeStatus.DECODED, sweep
        change = max(wasserstein(a, b_) for a, b_ in zip(x.cells, x_new.cells))
        x = x_new
        if subset is None:
            if change < cfg.coupled_stall:
                return x, DeStatus.FIXED_POINT, sweep
        else:
            # under the random schedule every section updates within any 3
            # consecutive sweeps, so a stalled rolling window means a FP
            recent.append(change)
            if len(recent) > 3:
                recent.pop(0)
            if len(recent) == 3 and max(recent) < cfg.coupled_stall:
                return x, DeStatus.FIXED_POINT, sweep
    return x, DeStatus.MAX_ITER, cfg.max_iter


def coupled_bp_threshold(p: CoupledParams, fam: ChannelFamily,
                         cfg: DeConfig = DeConfig(), schedule="parallel",
                         use_scalar_hint: bool = True,
                         details: dict | None = None) -> float:
    """Entropy bisection with predicate coupled_forward_de == Decoded.  The
    scalar coupled BEC threshold gives a certified decodable lower bracket
    via B(c_h) <= eps^BP_coupled(BEC)."""
    lo, hi = 0.0, 1.0
    probes = 0
    if use_scalar_hint:
        eps = scalar_coupled_bec_threshold(p, tol=1e-4) - 2e-3
        h_lo = _entropy_at_batta(fam, eps)
        if h_lo is not None and h_lo > 0.0:
            _, status, _ = coupled_forward_de(
                p, fam.make(param_from_entropy(fam, h_lo)), schedule, cfg)
            probes += 1
            if status is DeStatus.DECODED:
                lo = h_lo
    while hi - lo > cfg.bisect_tol:
        m = 0.5 * (lo + hi)
        _, status, _ = coupled_forward_de(
            p, fam.make(param_from_entropy(fam, m)), schedule, cfg)
        probes += 1
        if status is DeStatus.DECODED:
            lo = m
        else:
            hi = m
    if details is not None:
        details["probes"] = probes
    return 0.5 * (lo + hi)


def _entropy_at_batta(fam: ChannelFamily, target_b: float) -> float | None:
    """Channel entropy at which the family's Battacharyya equals target_b."""
    if not (0.0 < target_b < 1.0):
        return None
    lo, hi = fam.param_min, fam.param_max
    if battacharyya(fam.make(hi)) < target_b:
        return None
    for _ in range(100):
        m = 0.5 * (lo + hi)
        if battacharyya(fam.make(m)) < target_b:
            lo = m
        else:
            hi = m
    return fam.entropy_of_param(0.5 * (lo + hi))


_FUNCTIONALS = {"H": entropy, "B": battacharyya, "E": error_prob}


def coupled_constellation_functional(x: Constellation, F: str = "H") -> float:
    """Average functional over the stored (non-virtual) sections."""
    f = _FUNCTIONALS[F]
    return sum(f(d) for d in x.cells) / len(x.cells)


def coupled_fixed_entropy_de(p: CoupledParams, fam: ChannelFamily,
                             target_h: float, cfg: DeConfig = DeConfig()
                             ) -> tuple[Constellation, float]:
    """Coupled DE at fixed average entropy: each sweep computes the
    channel-free updates b_i and bisects the family so that the average of
    H(c ⊛ b_i) equals target_h."""
    if not (0.0 < target_h < 1.0):
        raise ValueError("target_h must be in (0, 1)")
    grid = fam.grid
    x = uniform_constellation(p, delta_zero(grid))
    h = 1.0
    for _ in range(cfg.max_iter):
        bs = _channel_free_updates(p, x, grid)
        c, h = _solve_coupled_channel(fam, bs, target_h, cfg.inner_entropy_tol)
        new = tuple(var_conv(c, b) for b in bs)
        change = max(wasserstein(a, b_) for a, b_ in zip(x.cells, new))
        x = Constellation(p, new)
        if change < cfg.fp_wasserstein_tol:
            return x, h
    return x, h


def _channel_free_updates(p: CoupledParams, x: Constellation, grid):
    get = _cell_getter(x, grid)
    cache: dict = {}

    def C_of(m):
        C = cache.get(m)
        if C is None:
            A = uniform_mix([get(m - k) for k in range(p.w)])
            C = check_power(A, p.dd.r - 1)
            cache[m] = C
        return C

    out = []
    for i in _update_range(p):
        mix = uniform_mix([C_of(i + j) for j in range(p.w)])
        out.append(var_power(mix, p.dd.l - 1))
    return out


def _solve_coupled_channel(fam, bs, target, tol):
    lo, hi = fam.param_min, fam.param_max

    def avg_h(param):
        c = fam.make(param)
        return sum(entropy(var_conv(c, b)) for b in bs) / len(bs), c

    top, _ = avg_h(hi)
    if top < target - 1e-12:
        raise FixedEntropyUndefined(
            f"average H(T_1) = {top:.6f} < target {target:.6f}")
    for _ in range(200):
        m = 0.5 * (lo + hi)
        hm, c = avg_h(m)
        if abs(hm - target) <= tol or hi - lo < 1e-15 * max(1.0, abs(m)):
            return c, fam.entropy_of_param(m)
        if hm < target:
            lo = m
        else:
            hi = m
    m = 0.5 * (lo + hi)
    return fam.make(m), fam.entropy_of_param(m)


def coupled_gexit_curve(p: CoupledParams, fam: ChannelFamily, h_grid,
                        cfg: DeConfig = DeConfig()
                        ) -> tuple[list[GexitPoint], list[float]]:
    """Normalized coupled GEXIT curve: average over sections of the GEXIT
    value of z_i = ghat window, along coupled fixed-entropy FPs."""
    from .convolve import ghat_op
    points: list[GexitPoint] = []
    skipped: list[float] = []
    for target in h_grid:
        try:
            x, h = coupled_fixed_entropy_de(p, fam, float(target), cfg)
        except FixedEntropyUndefined:
            skipped.append(float(target))
            continue
        get = _cell_getter(x, fam.grid)
        gs = []
        for i in _update_range(p):
            window = [get(i + t) for t in range(-p.w + 1, p.w)]
            z = ghat_op(p.dd, p.w, window)
            gs.append(gexit_value(fam, h, z))
        points.append(GexitPoint(h, coupled_constellation_functional(x, "H"),
                                 float(np.mean(gs))))
    return points, skipped


# ---------------------------------------------------------------------------
# scalar coupled BEC recursion (oracle and certificate)


def scalar_coupled_bec(p: CoupledParams, eps: float,
                       max_sweeps: int = 40000, stall: float = 1e-12
                       ) -> tuple[np.ndarray, DeStatus, int]:
    """Coupled BEC recursion on erasure values (the density recursion run
    with equality):
    x_i <- eps (1 - (1/w) sum_j (1 - (1/w) sum_k x_{i+j-k})^{r-1})^{l-1}."""
    l, r, L, w = p.dd.l, p.dd.r, p.L, p.w
    if p.boundary == CIRCULAR:
        raise ValueError("scalar recursion implemented for chain boundaries")
    one_sided = p.boundary in (ONE_SIDED_FORCED, ONE_SIDED_FREE)
    n = p.n_sections
    x = np.full(n, eps)

    def extend(xv):
        # pad w-1 on each side per the boundary convention (erasure of
        # Delta_inf is 0, of Delta_0 is 1 * eps after the channel; the pad
        # values below are pre-channel message erasures)
        left = np.zeros(w - 1)
        if not one_sided:
            right = np.zeros(w - 1)
        elif p.boundary == ONE_SIDED_FREE:
            right = np.full(w - 1, xv[-1])
        else:
            right = np.full(w - 1, 1.0)
        return np.concatenate([left, xv, right])

    kern = np.full(w, 1.0 / w)
    for sweep in range(1, max_sweeps + 1):
        ext = extend(x)
        A = np.convolve(ext, kern, mode="valid")     # A_m, m in [-L, L+w-1]
        C = (1.0 - A) ** (r - 1)
        inner = 1.0 - np.convolve(C, kern, mode="valid")
        x_new = eps * inner ** (l - 1)
        if np.max(x_new) < 1e-12:
            return x_new, DeStatus.DECODED, sweep
        if np.max(np.abs(x_new - x)) < stall:
            return x_new, DeStatus.FIXED_POINT, sweep
        x = x_new
    return x, DeStatus.MAX_ITER, max_sweeps


def scalar_coupled_bec_threshold(p: CoupledParams, tol: float = 1e-5,
                                 max_sweeps: int = 40000) -> float:
    """Coupled BEC BP threshold of the scalar recursion, by bisection."""
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        m = 0.5 * (lo + hi)
        _, status, _ = scalar_coupled_bec(p, m, max_sweeps)
        if status is DeStatus.DECODED:
            lo = m
        else:
            hi = m
    return 0.5 * (lo + hi)


def bsc_certificate_p(target_b: float = 0.5) -> float:
    """BSC crossover p with 2 sqrt(p(1-p)) = target_b (the BMS-vs-BEC
    coupled-threshold certificate)."""
    return 0.5 * (1.0 - math.sqrt(1.0 - target_b * target_b))


# ---------------------------------------------------------------------------
# one-sided and circular variants


def one_sided_forward_de(p: CoupledParams, c: Density,
                         cfg: DeConfig = DeConfig()
                         ) -> tuple[Constellation, DeStatus, int]:
    """Forward DE on sections [-N, 0] (N = params.L) with Delta_inf to the
    left and the forced/free convention to the right; returns the limit."""
    if p.boundary not in (ONE_SIDED_FORCED, ONE_SIDED_FREE):
        raise ValueError("params must use a one-sided boundary")
    return coupled_forward_de(p, c, "parallel", cfg)


def circular_de(p: CoupledParams, c: Density, zero_span: int | None = None,
                cfg: DeConfig = DeConfig()) -> tuple[Constellation, DeStatus, int]:
    """Circular ensemble: indices mod 2L+w, `zero_span` consecutive sections
    (default w-1) pinned to Delta_inf."""
    if p.boundary != CIRCULAR:
        raise ValueError("params must use the circular boundary")
    span = p.w - 1 if zero_span is None else zero_span
    n = p.n_sections
    pinned = tuple(range(n - span, n))
    return coupled_forward_de(p, c, "parallel", cfg, pinned=pinned)
