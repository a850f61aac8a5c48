"""Wasserstein metric and degradation distance on symmetric densities.

Both are integrals of |D|-domain cdf differences over [0,1]:

    d(a,b) = int_0^1 |A(x) - B(x)| dx          (Wasserstein)
    D(a,b) = int_0^1 x (B(x) - A(x)) dx        (degradation distance, a < b)

computed exactly for the piecewise-constant cdfs of the discrete
representation on the union of both supports.  Same-grid densities share the
same support, so the common case is a plain vector operation.
"""

from __future__ import annotations

import numpy as np

from .density import AbsDRepr, Density, to_absD


def _cdf_pair(a: Density, b: Density) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Merged support and both cdfs evaluated on it (right-continuous)."""
    ra, rb = to_absD(a), to_absD(b)
    if a.grid == b.grid:
        return ra.support, ra.cdf, rb.cdf
    z = np.union1d(ra.support, rb.support)
    ca = _eval_cdf(ra, z)
    cb = _eval_cdf(rb, z)
    return z, ca, cb


def _eval_cdf(r: AbsDRepr, z: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(r.support, z, side="right") - 1
    out = np.where(idx >= 0, r.cdf[np.clip(idx, 0, None)], 0.0)
    return out


def wasserstein(a: Density, b: Density) -> float:
    """d(a,b) = int_0^1 |A - B| over the |D|-cdfs; in [0, 1]."""
    z, ca, cb = _cdf_pair(a, b)
    seg = np.diff(np.concatenate([z, [1.0]]))
    return float(np.abs(ca - cb) @ seg)


def deg_distance(a: Density, b: Density) -> float:
    """D(a,b) = int_0^1 x (B(x) - A(x)) dx; in [0,1] when a is upgraded
    w.r.t. b (a < b), signed otherwise.  Additive along degradation chains."""
    z, ca, cb = _cdf_pair(a, b)
    z1 = np.concatenate([z, [1.0]])
    # int over [z_i, z_{i+1}) of x dx = (z_{i+1}^2 - z_i^2)/2
    seg = 0.5 * np.diff(z1 * z1)
    return float((cb - ca) @ seg)
