"""Variable-node and check-node convolutions and the DE step operators.

Variable node (⊛): L-values add, so the pmf convolution is an ordinary
discrete convolution (FFT).  Positive overflow past +Y becomes "perfect
knowledge" and is folded into the +inf atom; negative overflow clamps into
the leftmost bin (the clamped mass is tracked as a diagnostic).

Check node (⊡): combining rule y = 2 atanh(tanh(y1/2) tanh(y2/2)).  The
output magnitude depends only on the input magnitudes and the sign is the
product of signs, so with u_j = (mass at +y_j) + (mass at -y_j) and
v_j = (mass at +y_j) - (mass at -y_j) the output magnitude/sign masses are
two quadratic forms sum_{jk} u_j u_k and sum_{jk} v_j v_k deposited at
2 atanh(t_j t_k), with a two-bin linear split onto the magnitude grid.  The
(index, weight) deposit table is precomputed once per grid and the
accumulation runs in a numba kernel.

Neutral elements: Delta_0 for ⊛, Delta_{+inf} for ⊡; each is absorbing for
the other operation.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from scipy.signal import fftconvolve

from .density import (Density, DegreePair, GridSpec, delta_inf, delta_zero,
                      make_density, _check_same_grid, _grid_tables)

# last clamped negative-overflow mass from var_conv (diagnostic only)
LAST_NEG_CLAMP = 0.0

_CHECK_TABLES: dict = {}


def _check_table(grid: GridSpec):
    """Deposit table for ⊡: for each magnitude pair (j,k) the lower bin index
    and fractional weight of 2 atanh(t_j t_k) on the magnitude grid."""
    key = (grid.half_range, grid.bins)
    tab = _CHECK_TABLES.get(key)
    if tab is None:
        mid = grid.mid
        t = _grid_tables(grid)["absd_z"]          # tanh(j*delta/2), j=0..mid
        f = 2.0 * np.arctanh(np.outer(t, t)) / grid.delta
        np.minimum(f, float(mid - 1), out=f)
        lo = f.astype(np.int32)
        w = (f - lo).astype(np.float64)
        tab = (lo.ravel(), w.ravel())
        _CHECK_TABLES[key] = tab
    return tab


@njit(cache=True, fastmath=True)
def _check_kernel(u, v, lo, w, outU, outV):
    m = u.shape[0]
    for j in range(m):
        uj = u[j]
        vj = v[j]
        if uj < 1e-300 and -1e-300 < vj < 1e-300:
            continue
        base = j * m
        cu = uj * uj
        cv = vj * vj
        l0 = lo[base + j]
        ww = w[base + j]
        outU[l0] += cu * (1.0 - ww)
        outU[l0 + 1] += cu * ww
        outV[l0] += cv * (1.0 - ww)
        outV[l0 + 1] += cv * ww
        for k in range(j + 1, m):
            cu = 2.0 * uj * u[k]
            cv = 2.0 * vj * v[k]
            l0 = lo[base + k]
            ww = w[base + k]
            outU[l0] += cu * (1.0 - ww)
            outU[l0 + 1] += cu * ww
            outV[l0] += cv * (1.0 - ww)
            outV[l0 + 1] += cv * ww


@njit(cache=True, fastmath=True)
def _check_kernel_bilinear(ua, va, ub, vb, lo, w, outU, outV):
    m = ua.shape[0]
    for j in range(m):
        uj = ua[j]
        vj = va[j]
        if uj < 1e-300 and -1e-300 < vj < 1e-300:
            continue
        base = j * m
        for k in range(m):
            cu = uj * ub[k]
            cv = vj * vb[k]
            l0 = lo[base + k]
            ww = w[base + k]
            outU[l0] += cu * (1.0 - ww)
            outU[l0 + 1] += cu * ww
            outV[l0] += cv * (1.0 - ww)
            outV[l0 + 1] += cv * ww


def _signed_magnitudes(d: Density) -> tuple[np.ndarray, np.ndarray]:
    """(u, v) over magnitudes j=0..mid: total and signed-difference mass."""
    mid = d.grid.mid
    u = np.empty(mid + 1)
    v = np.empty(mid + 1)
    u[0] = d.pmf[mid]
    v[0] = d.pmf[mid]          # sign of a 0-magnitude atom is irrelevant
    pos = d.pmf[mid + 1:]
    neg = d.pmf[mid - 1:0:-1]
    u[1:mid] = pos + neg
    v[1:mid] = pos - neg
    u[mid] = d.pmf[0]
    v[mid] = -d.pmf[0]
    return u, v


def var_conv(a: Density, b: Density) -> Density:
    """a ⊛ b: L-values add.  var_conv(Delta_0, d) = d; Delta_inf absorbs."""
    global LAST_NEG_CLAMP
    _check_same_grid(a, b)
    grid = a.grid
    n, mid = grid.bins, grid.mid
    if n <= 512:
        # direct convolution beats the FFT dispatch overhead on small grids
        full = np.convolve(a.pmf, b.pmf)          # length 2n-1, y = (s-n)*delta
    else:
        full = fftconvolve(a.pmf, b.pmf)
    pmf = full[mid:mid + n].copy()
    neg_clamp = full[:mid].sum()
    pmf[0] += neg_clamp
    LAST_NEG_CLAMP = float(neg_clamp)
    pos_over = full[mid + n:].sum()
    inf = a.inf_mass + b.inf_mass - a.inf_mass * b.inf_mass + pos_over
    return make_density(grid, pmf, inf)


def check_conv(a: Density, b: Density) -> Density:
    """a ⊡ b: y = 2 atanh(tanh(y1/2) tanh(y2/2)) pairwise on all atoms.
    check_conv(Delta_inf, d) = d; Delta_0 absorbs."""
    _check_same_grid(a, b)
    grid = a.grid
    mid = grid.mid
    lo, w = _check_table(grid)
    ua, va = _signed_magnitudes(a)
    ub, vb = _signed_magnitudes(b)
    outU = np.zeros(mid + 1)
    outV = np.zeros(mid + 1)
    if a is b:
        _check_kernel(ua, va, lo, w, outU, outV)
    else:
        _check_kernel_bilinear(ua, va, ub, vb, lo, w, outU, outV)
    pmf = np.zeros(grid.bins)
    pmf[mid] = outU[0]
    p_pos = 0.5 * (outU[1:mid] + outV[1:mid])
    p_neg = 0.5 * (outU[1:mid] - outV[1:mid])
    pmf[mid + 1:] = p_pos
    pmf[mid - 1:0:-1] = p_neg
    pmf[0] = 0.5 * (outU[mid] - outV[mid])
    inf = a.inf_mass * b.inf_mass + 0.5 * (outU[mid] + outV[mid])
    # Delta_inf is the ⊡ neutral: the inf atom of one operand passes the
    # other operand's finite part through unchanged.
    pmf += a.inf_mass * b.pmf + b.inf_mass * a.pmf
    return make_density(grid, pmf, inf)


def var_power(a: Density, k: int) -> Density:
    """a^{⊛k} by binary exponentiation; k=0 is the ⊛ neutral Delta_0."""
    return _power(a, k, var_conv, delta_zero(a.grid))


def check_power(a: Density, k: int) -> Density:
    """a^{⊡k} by binary exponentiation; k=0 is the ⊡ neutral Delta_inf."""
    return _power(a, k, check_conv, delta_inf(a.grid))


def _power(a: Density, k: int, conv, neutral: Density) -> Density:
    if k < 0:
        raise ValueError("power must be >= 0")
    if k == 0:
        return neutral
    result = None
    sq = a
    while k:
        if k & 1:
            result = sq if result is None else conv(result, sq)
        k >>= 1
        if k:
            sq = conv(sq, sq)
    return result


def de_step(dd: DegreePair, c: Density, x: Density) -> Density:
    """One density-evolution iteration: c ⊛ (x^{⊡(r-1)})^{⊛(l-1)}."""
    return var_conv(c, var_power(check_power(x, dd.r - 1), dd.l - 1))


def uniform_mix(ds: list[Density]) -> Density:
    """Exact equal-weight mixture (no projection/renormalization)."""
    grid = ds[0].grid
    pmf = np.zeros(grid.bins)
    inf = 0.0
    for d in ds:
        _check_same_grid(ds[0], d)
        pmf += d.pmf
        inf += d.inf_mass
    k = 1.0 / len(ds)
    return Density(grid, pmf * k, inf * k)


def _g_core(dd: DegreePair, w: int, window: list[Density], exponent: int) -> Density:
    if len(window) != 2 * w - 1:
        raise ValueError("window must hold 2w-1 densities")
    # inner averages A_j = (1/w) sum_k x_{i+j-k}, j = 0..w-1
    cs = [check_power(uniform_mix(window[j:j + w]), dd.r - 1) for j in range(w)]
    return var_power(uniform_mix(cs), exponent)


def g_op(dd: DegreePair, w: int, window: list[Density]) -> Density:
    """Coupled DE update kernel:
    ((1/w) sum_j ((1/w) sum_k x_{i+j-k})^{⊡(r-1)})^{⊛(l-1)},
    with window = [x_{i-w+1}, ..., x_{i+w-1}]."""
    return _g_core(dd, w, window, dd.l - 1)


def ghat_op(dd: DegreePair, w: int, window: list[Density]) -> Density:
    """EXIT/decision variant of g_op: exponent ⊛l instead of ⊛(l-1)."""
    return _g_core(dd, w, window, dd.l)
