"""Closed-form analytic bounds for (l,r)-regular and coupled ensembles.

Everything here is scalar arithmetic: the BP-threshold upper bound, the
continuity-region constants (x~, B~, h~), the universal continuity bound
(x-bar, h-bar), the negativity interval of the GEXIT area functional, the
admissibility report for (l,r,w), the coupled-threshold gap f(l,r,w), and
the MAP-gap bound (w-1)(r-1)^3/L.  Root-finding is bracketed bisection to
1e-10 throughout (these are one-shot computations; robustness wins).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .density import DegreePair

E = math.e


def h2(x: float) -> float:
    """Binary entropy function (bits); h2(0) = h2(1) = 0."""
    if x <= 0.0 or x >= 1.0:
        if x in (0.0, 1.0):
            return 0.0
        raise ValueError("h2 domain is [0, 1]")
    return -(x * math.log2(x) + (1.0 - x) * math.log2(1.0 - x))


def h2_inv(y: float, tol: float = 1e-12) -> float:
    """Inverse of h2 on [0, 1/2], by bisection."""
    if not (0.0 <= y <= 1.0):
        raise ValueError("h2_inv domain is [0, 1]")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        m = 0.5 * (lo + hi)
        if h2(m) < y:
            lo = m
        else:
            hi = m
    return 0.5 * (lo + hi)


def _bisect(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    flo = f(lo)
    if flo == 0.0:
        return lo
    if flo * f(hi) > 0:
        raise ValueError("no sign change on bracket")
    while hi - lo > tol:
        m = 0.5 * (lo + hi)
        fm = f(m)
        if fm == 0.0:
            return m
        if fm * flo < 0:
            hi = m
        else:
            lo, flo = m, fm
    return 0.5 * (lo + hi)


def bp_upper_bound(dd: DegreePair) -> float:
    """h^BP(l,r) <= h2(1/(2 sqrt(r-1))) / (1 - l e^{-2 sqrt(r-1)})."""
    r = dd.r
    return h2(1.0 / (2.0 * math.sqrt(r - 1))) / \
        (1.0 - dd.l * math.exp(-2.0 * math.sqrt(r - 1)))


def _a_fn(dd: DegreePair, x: float) -> float:
    return (1.0 - (1.0 - x) ** (dd.r - 1)) ** (dd.l - 1)


def _b_fn(dd: DegreePair, x: float) -> float:
    return (dd.l - 1) ** 2 * (dd.r - 1) ** 2 * x * (1.0 - x) ** (2 * (dd.r - 2))


def _c_fn(dd: DegreePair, x: float) -> float:
    return math.sqrt(x / _a_fn(dd, x))


@dataclass(frozen=True)
class ContinuityConstants:
    x_tilde: float
    batta_tilde: float      # B~ = c(x~) = h~ for the BEC
    h_tilde_bec: float
    h_tilde_bsc: float


def continuity_constants(dd: DegreePair, tol: float = 1e-12) -> ContinuityConstants:
    """x~ is the unique root of a(x) - b(x) = 0 in (0, 1] with
    a(x) = (1-(1-x)^{r-1})^{l-1}, b(x) = (l-1)^2 (r-1)^2 x (1-x)^{2(r-2)};
    B~ = sqrt(x~/a(x~)); h~_BEC = B~; h~_BSC = h2((1 - sqrt(1-B~^2))/2)."""
    f = lambda x: _a_fn(dd, x) - _b_fn(dd, x)
    # a-b < 0 just above 0 and a(1)-b(1) = 1 > 0: bracket from a small start
    lo = 1e-9
    while f(lo) > 0:          # extremely high degrees push the crossing down
        lo *= 0.1
        if lo < 1e-300:
            raise RuntimeError("failed to bracket x~")
    x_t = _bisect(f, lo, 1.0, tol)
    b_t = _c_fn(dd, x_t)
    return ContinuityConstants(
        x_tilde=x_t,
        batta_tilde=b_t,
        h_tilde_bec=b_t,
        h_tilde_bsc=h2((1.0 - math.sqrt(1.0 - b_t * b_t)) / 2.0),
    )


def h_tilde_bms(dd: DegreePair, batta_to_entropy) -> float:
    """h~ for an arbitrary family given its Battacharyya->entropy map
    (the only continuity constant that needs the density module)."""
    return batta_to_entropy(continuity_constants(dd).batta_tilde)


@dataclass(frozen=True)
class UniversalBound:
    x_bar: float
    h_bar: float


def universal_continuity_bound(dd: DegreePair) -> UniversalBound:
    """x-bar = 1 - ((l-1)(r-1))^{-1/(r-2)}, h-bar = sqrt(x-bar/a(x-bar));
    valid for every BMS family."""
    x_bar = 1.0 - ((dd.l - 1) * (dd.r - 1)) ** (-1.0 / (dd.r - 2))
    return UniversalBound(x_bar, _c_fn(dd, x_bar))


def negativity_interval(dd: DegreePair, kappa: float = 0.0):
    """Entropy interval on which the GEXIT area functional is certified
    negative: [(3/4)^{(l-1)/2} + 1/(r-1)^3,
               l/r - l e^{-4(r-1)(2l/(11 e r))^{4/3}} - kappa].
    Returns (lo, hi) or None with a reason when empty / precondition fails."""
    l, r = dd.l, dd.r
    if not (0.0 <= kappa <= l / (4.0 * E * r)):
        raise ValueError("kappa must be in [0, l/(4 e r)]")
    rate = dd.design_rate
    if r < 1.0 + 5.0 * (1.0 / (1.0 - rate)) ** (4.0 / 3.0):
        return None, "precondition r >= 1 + 5 (1/(1-rate))^{4/3} fails"
    lo = (3.0 / 4.0) ** ((l - 1) / 2.0) + 1.0 / (r - 1) ** 3
    hi = l / r - l * math.exp(-4.0 * (r - 1) * (2.0 * l / (11.0 * E * r)) ** (4.0 / 3.0)) - kappa
    if lo >= hi:
        return None, f"empty interval: lo={lo:.6f} >= hi={hi:.6f}"
    return (lo, hi), None


def area_threshold_bounds(dd: DegreePair) -> tuple[float, float]:
    """l/r - l e^{-4(r-1)(2(1-rate)/(11e))^{4/3}} <= h^A <= l/r."""
    l, r = dd.l, dd.r
    lo = l / r - l * math.exp(
        -4.0 * (r - 1) * (2.0 * (1.0 - dd.design_rate) / (11.0 * E)) ** (4.0 / 3.0))
    return lo, l / r


def f_bound(l: int, r: int, w: int) -> float:
    """Coupled-threshold gap bound:
    f(l,r,w) = 8(r-1)^3 (sqrt2 + (2/ln2) l (r-1)) sqrt(2(l-1)(r-1)/w)."""
    return 8.0 * (r - 1) ** 3 * (math.sqrt(2.0) + (2.0 / math.log(2.0)) * l * (r - 1)) \
        * math.sqrt(2.0 * (l - 1) * (r - 1) / w)


def map_upper_gap(dd: DegreePair, w: int, L: int) -> float:
    """MAP-threshold gap of the coupled ensemble: (w-1)(r-1)^3 / L."""
    return (w - 1) * (dd.r - 1) ** 3 / L


def admissibility_report(dd: DegreePair, w: int) -> dict:
    """Per-condition booleans (i)-(vi) of the admissible-parameters
    definition, plus the derived degree conditions (vii)-(viii).

    Notes: logs are natural (the definition leaves the base unstated);
    condition (iii) is evaluated with the universal bound h-bar in place of
    the channel-dependent h~ (strictly stronger and family-free)."""
    l, r = dd.l, dd.r
    rate = dd.design_rate
    b = 6.0 / (math.log(4.0 / 3.0) * (1.0 - rate))
    c = (1.0 - rate) * (1.0 - r * math.exp(
        -4.0 * (r - 1) * (2.0 * (1.0 - rate) / (11.0 * E)) ** (4.0 / 3.0))) - 1.0 / r
    h_bar = universal_continuity_bound(dd).h_bar
    report = {
        "i": r >= math.sqrt(3.0) * b * math.log(b),
        "ii": (c > 0) and 2.0 * (l - 1) * (r - 1) * (1.0 - c * c) ** ((r - 2) / 2.0) < 1.0,
        "iii": h_bar <= c,
        "iv": w > 2 * l ** 3 * r ** 2,
        "v": w > 2 * (l - 1) * (r - 1) * (16.0 * math.sqrt(2.0) * r / (math.log(2.0) * l)) ** 2,
        "vi": w > 2 * (l - 1) * (r - 1) * r ** 2
             * (4.0 * (math.sqrt(2.0) + (2.0 / math.log(2.0)) * l * (r - 1))) ** 2,
        "vii": r >= (1.0 / (1.0 - rate)) * (1.0 + (2.0 / math.log(4.0 / 3.0))
                                            * math.log(2.0 * (r - 1) ** 3)),
        "viii": r >= 1.0 + 5.0 * (1.0 / (1.0 - rate)) ** (4.0 / 3.0),
        "notes": "natural logs; (iii) uses the universal h-bar >= h~",
    }
    report["all"] = all(report[k] for k in
                        ("i", "ii", "iii", "iv", "v", "vi"))
    return report
