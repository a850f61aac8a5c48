"""Closed-form bounds: continuity constants (reference table of 13 degree
pairs), BP upper bound, negativity interval, coupling-gap formulas, and the
admissibility report -- all checked against independent hand evaluation."""

import math

import numpy as np
import pytest

from scde.bounds import (admissibility_report, area_threshold_bounds,
                         bp_upper_bound, continuity_constants, f_bound, h2,
                         h2_inv, map_upper_gap, negativity_interval,
                         universal_continuity_bound)
from scde.density import (DegreePair, battacharyya, entropy, make_family)
from scde.uncoupled import bec_roots
from conftest import GRID

E = math.e

# reference values: x~, B~, h~_BAWGNC, h~_BSC, h-bar for 13 degree pairs
TABLE = {
    (3, 4): (0.5479, 0.8156, 0.7544, 0.7428, 0.8254),
    (6, 8): (0.4107, 0.6822, 0.5971, 0.5694, 0.6958),
    (9, 12): (0.3277, 0.6024, 0.5097, 0.4719, 0.6185),
    (12, 16): (0.2752, 0.5483, 0.4530, 0.4087, 0.5658),
    (3, 6): (0.3805, 0.6787, 0.5931, 0.5651, 0.7010),
    (4, 8): (0.3512, 0.6384, 0.5485, 0.5152, 0.6590),
    (5, 10): (0.3192, 0.6022, 0.5094, 0.4717, 0.6229),
    (6, 12): (0.2916, 0.5717, 0.4773, 0.4357, 0.5924),
    (3, 12): (0.2127, 0.4970, 0.4012, 0.3513, 0.5335),
    (4, 16): (0.1957, 0.4690, 0.3736, 0.3210, 0.5005),
    (5, 20): (0.1774, 0.4426, 0.3481, 0.2933, 0.4721),
    (6, 24): (0.1616, 0.4200, 0.3267, 0.2702, 0.4483),
    (7, 28): (0.1483, 0.4006, 0.3086, 0.2509, 0.4281),
}


def _a(l, r, x):
    return (1 - (1 - x) ** (r - 1)) ** (l - 1)


def test_h2_and_inverse():
    assert h2(0.5) == 1.0
    assert h2(0.11002786443835955) == pytest.approx(0.5, abs=1e-9)
    for y in np.linspace(0.001, 0.999, 50):
        x = h2_inv(float(y))
        assert h2(x) == pytest.approx(float(y), abs=1e-10)
    # standard sandwich: 1-(1-2x)^2 <= h2(x) <= 2 sqrt(x(1-x))
    for x in np.linspace(0.001, 0.5, 200):
        assert 1 - (1 - 2 * x) ** 2 <= h2(float(x)) + 1e-12
        assert h2(float(x)) <= 2 * math.sqrt(x * (1 - x)) + 1e-12


def test_continuity_constants_table():
    for (l, r), (xt, bt, _, hbsc, hbar) in TABLE.items():
        dd = DegreePair(l, r)
        cc = continuity_constants(dd)
        assert cc.x_tilde == pytest.approx(xt, abs=1e-3)
        assert cc.batta_tilde == pytest.approx(bt, abs=1e-3)
        assert cc.h_tilde_bec == cc.batta_tilde
        assert cc.h_tilde_bsc == pytest.approx(hbsc, abs=1e-3)
        assert universal_continuity_bound(dd).h_bar == pytest.approx(hbar, abs=1e-3)


def test_continuity_constants_defining_equations():
    for l, r in TABLE:
        dd = DegreePair(l, r)
        cc = continuity_constants(dd)
        x = cc.x_tilde
        a = _a(l, r, x)
        b = (l - 1) ** 2 * (r - 1) ** 2 * x * (1 - x) ** (2 * (r - 2))
        assert abs(a - b) < 1e-9
        # sign structure: a < b below the crossing, a > b above
        assert _a(l, r, 0.5 * x) < (l - 1) ** 2 * (r - 1) ** 2 * 0.5 * x \
            * (1 - 0.5 * x) ** (2 * (r - 2))
        xa = 0.5 * (1 + x)
        assert _a(l, r, xa) > (l - 1) ** 2 * (r - 1) ** 2 * xa \
            * (1 - xa) ** (2 * (r - 2))
        assert cc.batta_tilde == pytest.approx(math.sqrt(x / a), abs=1e-12)
        # c(x) = sqrt(x/a(x)) increases on [x~, 1]
        xs = np.linspace(x, 1.0, 200)
        cs = np.sqrt(xs / _a(l, r, xs))
        assert np.all(np.diff(cs) > -1e-12)


def test_h_tilde_bawgnc_via_density_inversion():
    """h~ for the BAWGNC: invert sigma -> B on the family, evaluate H."""
    fam = make_family("bawgnc", GRID)

    def batta_to_entropy(b_target):
        lo, hi = fam.param_min, fam.param_max
        for _ in range(80):
            m = 0.5 * (lo + hi)
            if battacharyya(fam.make(m)) < b_target:
                lo = m
            else:
                hi = m
        return entropy(fam.make(0.5 * (lo + hi)))

    for (l, r), (_, _, hbawgn, _, _) in TABLE.items():
        dd = DegreePair(l, r)
        got = batta_to_entropy(continuity_constants(dd).batta_tilde)
        assert got == pytest.approx(hbawgn, abs=3e-3)


def test_universal_bound_closed_form_and_dominations():
    for l, r in TABLE:
        dd = DegreePair(l, r)
        ub = universal_continuity_bound(dd)
        want_x = 1 - ((l - 1) * (r - 1)) ** (-1 / (r - 2))
        assert ub.x_bar == pytest.approx(want_x, abs=1e-12)
        assert ub.h_bar == pytest.approx(math.sqrt(want_x / _a(l, r, want_x)),
                                         abs=1e-12)
        # h-bar dominates every channel's h~ proxy (B~ = h~_BEC)
        assert ub.h_bar >= continuity_constants(dd).batta_tilde - 1e-9
        # decay bound: h-bar <= e^{1/4} sqrt(2) / (r-2)^{1/4}
        assert ub.h_bar <= E ** 0.25 * math.sqrt(2.0) / (r - 2) ** 0.25 + 1e-12
        # x-bar upper-bounds the unstable BEC root at eps = 1
        xu = bec_roots(dd, 1.0).x_u
        assert xu is not None and ub.x_bar >= xu - 1e-9


def test_bp_upper_bound():
    for l, r in ((3, 6), (3, 12), (3, 24), (3, 48), (4, 8)):
        want = h2(1 / (2 * math.sqrt(r - 1))) / (1 - l * E ** (-2 * math.sqrt(r - 1)))
        assert bp_upper_bound(DegreePair(l, r)) == pytest.approx(want, abs=1e-9)
    # decreasing in r and a true bound on the (3,6) BEC BP threshold
    vals = [bp_upper_bound(DegreePair(3, r)) for r in (6, 12, 24, 48)]
    assert all(v2 < v1 for v1, v2 in zip(vals, vals[1:]))
    from scde.uncoupled import bec_bp_threshold
    assert bec_bp_threshold(DegreePair(3, 6)) <= bp_upper_bound(DegreePair(3, 6))


def test_negativity_interval():
    # low degrees: precondition r >= 1 + 5 (1/(1-rate))^{4/3} fails
    iv, reason = negativity_interval(DegreePair(3, 6))
    assert iv is None and "precondition" in reason
    # (12,24): precondition holds (24 >= 1 + 5*2^{4/3} = 13.6) but the
    # interval is empty: the subtracted term l e^{-4(r-1)(2l/(11 e r))^{4/3}}
    # far exceeds l/r at these degrees
    iv, reason = negativity_interval(DegreePair(12, 24))
    assert iv is None and "empty" in reason
    # high degrees: nonempty, and the endpoints match hand evaluation
    l, r = 100, 200
    iv, reason = negativity_interval(DegreePair(l, r))
    assert reason is None
    lo, hi = iv
    want_lo = (3 / 4) ** ((l - 1) / 2) + 1 / (r - 1) ** 3
    want_hi = l / r - l * E ** (-4 * (r - 1) * (2 * l / (11 * E * r)) ** (4 / 3))
    assert lo == pytest.approx(want_lo, abs=1e-9)
    assert hi == pytest.approx(want_hi, abs=1e-9)
    assert 0 < lo < hi < 0.5
    # kappa shifts the upper end down and is range-checked
    iv2, _ = negativity_interval(DegreePair(l, r), kappa=0.01)
    assert iv2[1] == pytest.approx(hi - 0.01, abs=1e-12)
    with pytest.raises(ValueError):
        negativity_interval(DegreePair(l, r), kappa=1.0)


def test_area_threshold_bounds():
    for l, r in ((3, 6), (4, 8), (5, 10)):
        lo, hi = area_threshold_bounds(DegreePair(l, r))
        rate = 1 - l / r
        want_lo = l / r - l * E ** (-4 * (r - 1) * (2 * (1 - rate) / (11 * E)) ** (4 / 3))
        assert hi == pytest.approx(l / r, abs=1e-15)
        assert lo == pytest.approx(want_lo, abs=1e-9)
        assert lo <= hi
    # the (3,6) BEC area threshold 0.4881 sits inside the bounds
    lo, hi = area_threshold_bounds(DegreePair(3, 6))
    assert lo <= 0.4881 <= hi


def test_f_bound_and_map_gap_hand_values():
    l, r, w = 3, 6, 7
    want = 8 * (r - 1) ** 3 * (math.sqrt(2) + 2 / math.log(2) * l * (r - 1)) \
        * math.sqrt(2 * (l - 1) * (r - 1) / w)
    assert f_bound(l, r, w) == pytest.approx(want, abs=1e-9)
    assert map_upper_gap(DegreePair(3, 6), w=3, L=100) == \
        pytest.approx(2 * 125 / 100, abs=1e-12)
    # decreasing in w / L respectively
    assert f_bound(3, 6, 100) < f_bound(3, 6, 10)
    assert map_upper_gap(DegreePair(3, 6), 3, 200) < \
        map_upper_gap(DegreePair(3, 6), 3, 100)


def test_admissibility_report_arithmetic():
    dd = DegreePair(3, 6)
    rep = admissibility_report(dd, w=2000)
    # condition (iv): w > 2 l^3 r^2 = 1944
    assert rep["iv"] is True
    assert admissibility_report(dd, w=1944)["iv"] is False
    # condition (i) by hand: b = 6/(ln(4/3)(1-rate)); r >= sqrt(3) b ln b
    b = 6 / (math.log(4 / 3) * 0.5)
    assert rep["i"] == (6 >= math.sqrt(3) * b * math.log(b))
    assert rep["i"] is False        # 6 << 41.7 * ln(41.7)
    # condition (v) and (vi) by hand at w = 2000
    v = 2000 > 2 * 2 * 5 * (16 * math.sqrt(2) * 6 / (math.log(2) * 3)) ** 2
    assert rep["v"] == v
    vi = 2000 > 2 * 2 * 5 * 36 * (4 * (math.sqrt(2) + 2 / math.log(2) * 15)) ** 2
    assert rep["vi"] == vi
    assert rep["all"] == all(rep[k] for k in ("i", "ii", "iii", "iv", "v", "vi"))
    # (3,6) is not admissible at any practical w (condition (i) already fails)
    assert rep["all"] is False
    # very high degrees satisfy the degree-only conditions (vii)-(viii)
    big = admissibility_report(DegreePair(100, 200), w=10 ** 9)
    assert big["viii"] is True
