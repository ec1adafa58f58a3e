"""Closed-form Abel-map dimensions for superisolated hypersurface germs.

For a degree-d superisolated singularity the divisorial filtration of forms
reduces to counting monomials x^m by total degree: the Gorenstein form has
pole order d-2 along the first exceptional curve E_0 and x^m kills |m| of it.
Everything below is pure arithmetic in d, the Chern multiplicity k of
-l' = k E_0*, and the twist multiplicity k0 of -l'_0 = k0 E_0*; no
resolution graph is ever built (that would depend on the cuspidal curve).
"""

from math import comb

from .errors import SOutOfRange
from .pattern import TestFunction


def _count_monomials(lo, hi):
    # |{m in Z_{>=0}^3 : lo <= |m| <= hi}| by direct enumeration
    if hi < lo:
        return 0
    return sum(comb(t + 2, 2) for t in range(max(lo, 0), hi + 1))


def si_pg(d):
    """p_g = d(d-1)(d-2)/6 = #{m : |m| <= d-3}; both computed and compared."""
    if d < 3:
        raise SOutOfRange(f"degree d = {d} < 3")
    closed = d * (d - 1) * (d - 2) // 6
    counted = _count_monomials(0, d - 3)
    assert closed == counted
    return closed


def si_gs(d, s):
    """g_s = #{m : d-2-s <= |m| <= d-3}; checks p_g - g_s = C(d-s, 3)."""
    if d < 3:
        raise SOutOfRange(f"degree d = {d} < 3")
    if not 0 <= s <= d - 2:
        raise SOutOfRange(f"s = {s} outside [0, {d - 2}]")
    g = _count_monomials(d - 2 - s, d - 3)
    assert si_pg(d) - g == comb(d - s, 3)
    return g


def si_dim(d, k):
    """dim Im c^{-kE_0*}(Z) = min_s { ks + C(d-s,3) } = sum_j min(k, C(j+2,2))."""
    if d < 3:
        raise SOutOfRange(f"degree d = {d} < 3")
    if k < 0:
        raise SOutOfRange(f"k = {k} < 0")
    by_min = min(k * s + comb(d - s, 3) for s in range(0, d - 1))
    by_sum = sum(min(k, comb(j + 2, 2)) for j in range(0, d - 2))
    assert by_min == by_sum
    return by_min


def _twisted_tail(d, k0, s):
    return sum(max(0, comb(j + 2, 2) - k0) for j in range(0, d - 2 - s))


def si_twisted_dim(d, k, k0):
    """Twisted dimension min_s { ks + sum_{j<=d-3-s} max(0, C(j+2,2) - k0) }."""
    if d < 3:
        raise SOutOfRange(f"degree d = {d} < 3")
    if k < 0 or k0 < 0:
        raise SOutOfRange("k and k0 must be nonnegative")
    val = min(k * s + _twisted_tail(d, k0, s) for s in range(0, d - 1))
    if k0 == 0:
        assert val == si_dim(d, k)
    return val


def si_h1_L0(d, k0):
    """h1(L_0) = sum_j max(0, C(j+2,2) - k0) for the generic k0-point twist."""
    return _twisted_tail(d, k0, 0)


# -- pattern-engine bridges --------------------------------------------------

def si_test_function(d, k):
    """tau(s) = C(d - min_k s, 3) = h1(O_Z) - g_s, on k generic points of E_0."""
    if d < 3 or k < 1:
        raise SOutOfRange("need d >= 3 and k >= 1")
    return TestFunction(
        name=f"si(d={d},k={k})",
        vertices=("E0",), counts={"E0": k}, bounds={"E0": d - 2},
        fn=lambda canon: comb(d - min(canon[0][1]), 3))


def si_twisted_test_function(d, k, k0):
    """tau(s) = h1(L_0) - g_{L_0,s} = sum_{j<=d-3-min s} max(0, C(j+2,2)-k0)."""
    if d < 3 or k < 1 or k0 < 0:
        raise SOutOfRange("need d >= 3, k >= 1, k0 >= 0")
    return TestFunction(
        name=f"si_twisted(d={d},k={k},k0={k0})",
        vertices=("E0",), counts={"E0": k}, bounds={"E0": d - 2},
        fn=lambda canon: _twisted_tail(d, k0, min(canon[0][1])))
