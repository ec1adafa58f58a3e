"""Topological invariants of Abel-map images for generic analytic structures.

For a generic structure, h1 of an effective cycle with connected support is
1 - min chi over the box [E_support, cycle]; everything else here (image
dimension d, codimension, the lower bounds D/T/t/t_Z, structure cycles,
recipe checks) reduces to exact chi-minimizations over boxes and is computed
from the graph alone.

An oracle seam lets every formula that is valid for arbitrary analytic
structures (the eq between d, codim and h1 of subcycles) run against
user-supplied h1 data instead of the generic values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import config
from .chiopt import Box, MinChiResult, min_chi_box, min_chi_effective, \
    max_of_minimizer_set
from .errors import (
    BoxTooLarge,
    DisconnectedSupport,
    InconsistentOracle,
    NonIntegralShift,
    SupportEnumerationTooLarge,
)
from .lattice import Cycle, ZERO, chi, components


def _require_effective(Z, what="cycle"):
    if not (Z.is_integral() and Z.is_effective()):
        raise ValueError(f"{what} must be an effective integral cycle")


def _require_ZgeE(G, Z):
    if not G.reduced_cycle().le(Z):
        raise ValueError("Z >= E required (every coefficient positive)")


# ---------------------------------------------------------------------------
# h1 for the generic structure, plus the oracle seam
# ---------------------------------------------------------------------------

def h1_generic(G, Zp):
    """h1(O_Zp) of the generic analytic structure.

    Summed over connected components J of the support: 1 - min chi over the
    box [E_J, Zp|_J]; h1(0) = 0.
    """
    _require_effective(Zp, "Zp")
    G.check_cycle(Zp)
    key = ("h1", Zp.key(G))
    if key not in G._cache:
        total = 0
        for J in components(G, Zp.support()):
            box = Box(G.reduced_cycle(J), Zp.restrict(J))
            total += 1 - min_chi_box(G, ZERO, box).value
        G._cache[key] = total
    return G._cache[key]


def as_h1_oracle(h1):
    """Normalize the h1 seam: None -> generic, mapping -> table lookup."""
    if h1 is None:
        return h1_generic
    if callable(h1):
        return h1
    table = dict(h1)

    def lookup(G, Zp):
        try:
            return table[Zp]
        except KeyError:
            raise InconsistentOracle(f"h1 table has no entry for {Zp!r}") from None

    return lookup


# ---------------------------------------------------------------------------
# lattice sweeps over [0, Z]: chi, h1 and shifted-minimum tables
# ---------------------------------------------------------------------------

class BoxSweep:
    """Tables of chi, h1_generic and shifted minima for every 0 <= u <= Z.

    One lexicographic pass fills each table through the recurrences
        m(u)      = min(chi(u), min_{u_v >= 2} m(u - E_v))        (support kept)
        nu0(u)    = min(g(u),  min_{u_v >= 1} nu0(u - E_v))       (g over [0,u])
        nupos(u)  = like nu0 but excluding l = 0,
    where g(l) = chi(l) + (l', l).  Everything is exact integer arithmetic.
    """

    def __init__(self, G, Z):
        _require_effective(Z, "Z")
        G.check_cycle(Z)
        self.G = G
        self.Z = Z
        self.verts = G.vertices
        self.ranges = [Z[v] for v in self.verts]
        vol = 1
        for r in self.ranges:
            vol *= r + 1
        if vol > config.enum_cap():
            raise BoxTooLarge(f"sweep volume {vol} exceeds cap {config.enum_cap()}")
        self.volume = vol
        n = len(self.verts)
        self._edge_idx = [(G.index[u], G.index[w]) for u, w in G.edges]
        self._f0 = [[(t * (G.self_int[v] + 2 - t * G.self_int[v])) // 2
                     for t in range(self.ranges[i] + 1)]
                    for i, v in enumerate(self.verts)]
        self._ncomp_memo = {}
        self._adj_masks = [0] * n
        for u, w in self._edge_idx:
            self._adj_masks[u] |= 1 << w
            self._adj_masks[w] |= 1 << u
        self._chi = {}
        self._m = {}
        self._fill_base()
        self._nu = {}

    def tuples(self):
        return product(*(range(r + 1) for r in self.ranges))

    def _fill_base(self):
        chi_t, m_t = self._chi, self._m
        f0, edges = self._f0, self._edge_idx
        n = len(self.verts)
        for u in self.tuples():
            c = 0
            for i in range(n):
                c += f0[i][u[i]]
            for i, j in edges:
                c -= u[i] * u[j]
            chi_t[u] = c
            best = c
            for i in range(n):
                if u[i] >= 2:
                    prev = m_t[u[:i] + (u[i] - 1,) + u[i + 1:]]
                    if prev < best:
                        best = prev
            m_t[u] = best

    def _ncomp(self, mask):
        if mask not in self._ncomp_memo:
            cnt, rest = 0, mask
            while rest:
                cnt += 1
                seed = rest & -rest
                comp = seed
                frontier = seed
                while frontier:
                    i = frontier.bit_length() - 1
                    frontier &= ~(1 << i)
                    nbrs = self._adj_masks[i] & rest & ~comp
                    comp |= nbrs
                    frontier |= nbrs
                rest &= ~comp
            self._ncomp_memo[mask] = cnt
        return self._ncomp_memo[mask]

    def mask(self, u):
        m = 0
        for i, t in enumerate(u):
            if t:
                m |= 1 << i
        return m

    def chi(self, u):
        return self._chi[u]

    def h1(self, u):
        """h1_generic of the cycle with coefficient tuple u."""
        mask = self.mask(u)
        if not mask:
            return 0
        return self._ncomp(mask) - self._m[u]

    def cycle(self, u):
        return Cycle({v: t for v, t in zip(self.verts, u) if t})

    def tuple_of(self, x):
        return x.key(self.G)

    def shifted_tables(self, lprime):
        """(nu0, nupos) tables for g(l) = chi(l) + (l', l)."""
        akey = lprime.key(self.G)
        if akey in self._nu:
            return self._nu[akey]
        a = [lprime.a.get(v, 0) for v in self.verts]
        n = len(self.verts)
        nu0, nupos = {}, {}
        INF = None
        for u in self.tuples():
            g = self._chi[u] + sum(a[i] * u[i] for i in range(n))
            if any(u):
                b0, bp = g, g
            else:
                b0, bp = 0, INF
            for i in range(n):
                if u[i] >= 1:
                    prev = u[:i] + (u[i] - 1,) + u[i + 1:]
                    if nu0[prev] < b0:
                        b0 = nu0[prev]
                    pp = nupos[prev]
                    if pp is not None and (bp is None or pp < bp):
                        bp = pp
            nu0[u], nupos[u] = b0, bp
        self._nu[akey] = (nu0, nupos)
        return nu0, nupos


def box_sweep(G, Z):
    key = ("sweep", Z.key(G))
    if key not in G._cache:
        G._cache[key] = BoxSweep(G, Z)
    return G._cache[key]


# ---------------------------------------------------------------------------
# dominance and e_Z(I)
# ---------------------------------------------------------------------------

def is_dominant(G, Z, lprime):
    """Topological dominance criterion: chi(-l') < chi(-l'+l) for all 0 < l <= Z."""
    _require_effective(Z, "Z")
    _require_ZgeE(G, Z)
    lprime.validate(G)
    res = min_chi_box(G, lprime.minus_lprime(G), Box(ZERO, Z))
    return res.max_minimizer.is_zero()


def e_Z_of_I(G, Z, I, h1=None):
    """e_Z(I) = h1(O_Z) - h1(O_{Z restricted off I})."""
    _require_effective(Z, "Z")
    _require_ZgeE(G, Z)
    oracle = as_h1_oracle(h1)
    keep = set(G.vertices) - set(I)
    return oracle(G, Z) - oracle(G, Z.restrict(keep))


# ---------------------------------------------------------------------------
# codimension of the image (the t_Z(l') expression) by three routes
# ---------------------------------------------------------------------------

def _codim_dp(G, Z, lprime):
    # maximize sum_{v in J} g_v(t_v) + sum_{edges in J} (t_u t_w - 1) with
    # g_v(t) = (e_v t^2 - (e_v+2) t)/2 - a_v t + 1 for t >= 1, g_v(0) = 0.
    a = {v: lprime.a.get(v, 0) for v in G.vertices}

    def node(v):
        e = G.self_int[v]
        out = [0]
        for t in range(1, Z[v] + 1):
            out.append((e * t * t - (e + 2) * t) // 2 - a[v] * t + 1)
        return out

    cost = {v: node(v) for v in G.vertices}
    order = []
    parent = {G.vertices[0]: None}
    stack = [G.vertices[0]]
    seen = {G.vertices[0]}
    while stack:
        u = stack.pop()
        order.append(u)
        for w in G.adj[u]:
            if w not in seen:
                seen.add(w)
                parent[w] = u
                stack.append(w)
    children = {u: [] for u in G.vertices}
    for u in G.vertices:
        if parent.get(u) is not None:
            children[parent[u]].append(u)

    table = {}
    for u in reversed(order):
        t = list(cost[u])
        for c in children[u]:
            tc = table[c]
            for tu in range(len(t)):
                best = tc[0]
                for tcv in range(1, len(tc)):
                    cand = tc[tcv] + (tu * tcv - 1 if tu >= 1 else 0)
                    if cand > best:
                        best = cand
                t[tu] += best
        table[u] = t

    root = order[0]
    val = max(table[root])
    pick = {root: table[root].index(val)}
    stack = [root]
    while stack:
        u = stack.pop()
        for c in children[u]:
            tc = table[c]
            tu = pick[u]
            vals = [tc[tcv] + (tu * tcv - 1 if tu >= 1 and tcv >= 1 else 0)
                    for tcv in range(len(tc))]
            pick[c] = vals.index(max(vals))
            stack.append(c)
    witness = Cycle({v: t for v, t in pick.items() if t})
    return val, witness


def _connected_masks_value(G, Z, lprime, sweepless_cache):
    # w(C) = 1 - min over [E_C, Z|_C] of (chi + (l',.)), via the chi-shift
    # rewrite min(chi(-l'+l)) - chi(-l').
    minus_lp = lprime.minus_lprime(G)
    chi_base = chi(G, minus_lp)

    def w_of(mask_verts):
        key = mask_verts
        if key not in sweepless_cache:
            J = [G.vertices[i] for i in range(len(G.vertices)) if key >> i & 1]
            box = Box(G.reduced_cycle(J), Z.restrict(J))
            r = min_chi_box(G, minus_lp, box)
            val = r.value - chi_base          # exact int after cancellation
            sweepless_cache[key] = (1 - val, r.min_minimizer)
        return sweepless_cache[key]

    return w_of


def _codim_supports(G, Z, lprime):
    n = len(G.vertices)
    if n > config.SUPPORT_VERTEX_CAP:
        raise SupportEnumerationTooLarge(
            f"{n} vertices exceed the 2^|V| support cap {config.SUPPORT_VERTEX_CAP}")
    adj_masks = [0] * n
    for u, w in G.edges:
        adj_masks[G.index[u]] |= 1 << G.index[w]
        adj_masks[G.index[w]] |= 1 << G.index[u]
    wcache = {}
    w_of = _connected_masks_value(G, Z, lprime, wcache)

    best, best_witness = 0, ZERO
    for J in range(1, 1 << n):
        total = 0
        parts = []
        rest = J
        while rest:
            seed = rest & -rest
            comp = seed
            frontier = seed
            while frontier:
                i = frontier.bit_length() - 1
                frontier &= ~(1 << i)
                nbrs = adj_masks[i] & rest & ~comp
                comp |= nbrs
                frontier |= nbrs
            rest &= ~comp
            parts.append(comp)
            total += w_of(comp)[0]
        if total > best:
            best = total
            wit = ZERO
            for comp in parts:
                wit = wit + w_of(comp)[1]
            best_witness = wit
    return best, best_witness


def _codim_brute(G, Z, lprime, h1, volume_cap):
    oracle = as_h1_oracle(h1)
    cap = volume_cap if volume_cap is not None else config.enum_cap()
    sweep = box_sweep(G, Z) if h1 is None else None
    best, wit = 0, ZERO
    if sweep is not None:
        a = [lprime.a.get(v, 0) for v in sweep.verts]
        for u in sweep.tuples():
            val = sweep.h1(u) - sum(ai * t for ai, t in zip(a, u))
            if val > best:
                best, wit = val, sweep.cycle(u)
        return best, wit
    vol = Box(ZERO, Z).volume()
    if vol > cap:
        raise BoxTooLarge(f"brute codim over volume {vol} exceeds cap {cap}")
    verts = G.vertices
    for tu in product(*(range(Z[v] + 1) for v in verts)):
        Z1 = Cycle({v: t for v, t in zip(verts, tu) if t})
        val = oracle(G, Z1) - lprime.lprime_dot(Z1)
        if val > best:
            best, wit = val, Z1
    return best, wit


def codim_generic(G, Z, lprime, method="dp", h1=None, with_witness=False):
    """codim Im c^{l'}(Z) = max_{0<=Z1<=Z} { h1(O_Z1) - (l', Z1) }.

    For the generic structure this equals the purely lattice-theoretic
    t_Z(l') = max { -(l',Z1) - chi(Z1) + chi(E_|Z1|) }.  Routes:
    "dp" (single tree DP), "supports" (2^|V| loop with per-support boxes),
    "brute" (plain Z1 enumeration; the only route for a custom h1 oracle).
    """
    _require_effective(Z, "Z")
    _require_ZgeE(G, Z)
    lprime.validate(G)
    if h1 is not None and method != "brute":
        raise ValueError("custom h1 oracles require method='brute'")
    if method == "dp":
        val, wit = _codim_dp(G, Z, lprime)
    elif method == "supports":
        val, wit = _codim_supports(G, Z, lprime)
    elif method == "brute":
        val, wit = _codim_brute(G, Z, lprime, h1, None)
    else:
        raise ValueError(f"unknown method {method!r}")
    return (val, wit) if with_witness else val


def codim_objective_at(G, Z1, lprime):
    """The eq-gen3 expression -(l',Z1) - chi(Z1) + chi(E_|Z1|) at a single Z1."""
    ncomp = len(components(G, Z1.support()))
    return -lprime.lprime_dot(Z1) - chi(G, Z1) + ncomp


def d_generic(G, Z, lprime, method="direct", h1=None):
    """dim Im c^{l'}(Z) for the generic structure (or a supplied h1 oracle).

    method "direct" evaluates the closed combinatorial formula
    1 - min_{E<=l<=Z} chi + min_{Z1} { (l',Z1) + min_{E_J<=l<=Z1} chi - chi(E_J) }
    through support enumeration; "form3" evaluates
    min_{Z1} { (l',Z1) + h1(O_Z) - h1(O_Z1) } through the codim tree DP.
    Both must agree; tests assert that everywhere.
    """
    _require_effective(Z, "Z")
    _require_ZgeE(G, Z)
    lprime.validate(G)
    if method == "direct":
        if h1 is not None:
            raise ValueError("the direct formula is the generic-structure evaluation")
        h1_top = 1 - min_chi_box(G, ZERO, Box(G.reduced_cycle(), Z)).value
        val, _ = _codim_supports(G, Z, lprime)
        return h1_top - val
    if method == "form3":
        oracle = as_h1_oracle(h1)
        if h1 is None:
            val, _ = _codim_dp(G, Z, lprime)
        else:
            val, _ = _codim_brute(G, Z, lprime, h1, None)
        return oracle(G, Z) - val
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# the section-6 bounds D, T, t
# ---------------------------------------------------------------------------

def dominance_indicator(G, Zc, lprime):
    """D(Zc, l'): 0 when c^{l'} restricted to Zc is dominant, else 1."""
    res = min_chi_box(G, lprime.minus_lprime(G), Box(ZERO, Zc))
    return 0 if res.max_minimizer.is_zero() else 1


def bound_T(G, Zc, lprime):
    """T(Zc,l') = chi(-l') - min_{0<=l<=Zc} chi(-l'+l) + D(Zc,l'); needs |Zc| connected."""
    _require_effective(Zc, "Zc")
    lprime.validate(G)
    if Zc.is_zero() or len(components(G, Zc.support())) != 1:
        raise DisconnectedSupport("bound_T needs a nonzero cycle with connected support")
    minus_lp = lprime.minus_lprime(G)
    res = min_chi_box(G, minus_lp, Box(ZERO, Zc))
    D = 0 if res.max_minimizer.is_zero() else 1
    T = chi(G, minus_lp) - res.value + D
    assert T == int(T)
    return int(T)


def bound_t(G, Z, lprime, method="reduced", volume_cap=None):
    """t(Z,l') = max_{0<Z'<=Z} sum_i T(Z'_i, l') over connected pieces of Z'.

    "reduced" evaluates it through the proven identity with t_Z(l') (the
    eq-gen3 maximum); "brute" enumerates Z' directly and assembles T from the
    shifted sweep tables, which is the desk-scale oracle for that identity.
    """
    _require_effective(Z, "Z")
    _require_ZgeE(G, Z)
    lprime.validate(G)
    if method == "reduced":
        val, _ = _codim_dp(G, Z, lprime)
        return val
    if method != "brute":
        raise ValueError(f"unknown method {method!r}")
    cap = volume_cap if volume_cap is not None else config.enum_cap()
    vol = Box(ZERO, Z).volume()
    if vol > cap:
        raise SupportEnumerationTooLarge(
            f"brute t enumeration over volume {vol} exceeds cap {cap}")
    sweep = box_sweep(G, Z)
    nu0, nupos = sweep.shifted_tables(lprime)
    n = len(sweep.verts)
    best = 0
    for u in sweep.tuples():
        if not any(u):
            continue
        mask = sweep.mask(u)
        total = 0
        rest = mask
        while rest:
            seed = rest & -rest
            comp = seed
            frontier = seed
            while frontier:
                i = frontier.bit_length() - 1
                frontier &= ~(1 << i)
                nbrs = sweep._adj_masks[i] & rest & ~comp
                comp |= nbrs
                frontier |= nbrs
            rest &= ~comp
            cu = tuple(u[i] if comp >> i & 1 else 0 for i in range(n))
            D = 1 if (nupos[cu] is not None and nupos[cu] <= 0) else 0
            total += -nu0[cu] + D
        if total > best:
            best = total
    return best


# ---------------------------------------------------------------------------
# structure cycles C_min / C_max
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinimizerPair:
    c_min: Cycle
    c_max: Cycle


def structure_cycles(G, Z, lprime, h1=None, volume_cap=None, with_set=False):
    """Minimal and maximal minimizers of Z1 |-> (l',Z1) + h1(O_Z) - h1(O_Z1).

    Desk-scale enumeration of the whole minimizer set; verifies the set is
    closed under componentwise min/max before reporting the extremes.
    """
    _require_effective(Z, "Z")
    _require_ZgeE(G, Z)
    lprime.validate(G)
    cap = volume_cap if volume_cap is not None else config.enum_cap()
    vol = Box(ZERO, Z).volume()
    if vol > cap:
        raise BoxTooLarge(f"structure-cycle enumeration over volume {vol} exceeds cap {cap}")
    oracle = as_h1_oracle(h1)
    use_sweep = h1 is None
    sweep = box_sweep(G, Z) if use_sweep else None
    a = [lprime.a.get(v, 0) for v in G.vertices]

    best, S = None, []
    tuples = sweep.tuples() if use_sweep else product(*(range(Z[v] + 1) for v in G.vertices))
    for u in tuples:
        if use_sweep:
            val = sum(ai * t for ai, t in zip(a, u)) - sweep.h1(u)
        else:
            Z1 = Cycle({v: t for v, t in zip(G.vertices, u) if t})
            val = lprime.lprime_dot(Z1) - oracle(G, Z1)
        if best is None or val < best:
            best, S = val, [u]
        elif val == best:
            S.append(u)
    cycles = [Cycle({v: t for v, t in zip(G.vertices, u) if t}) for u in S]
    cmin, cmax = cycles[0], cycles[0]
    for c in cycles[1:]:
        cmin = cmin.meet(c)
        cmax = cmax.join(c)
    cset = frozenset(cycles)
    if cmin not in cset or cmax not in cset:
        raise InconsistentOracle("minimizer set of the dimension formula is not a lattice")
    pair = MinimizerPair(cmin, cmax)
    return (pair, cset) if with_set else pair


# ---------------------------------------------------------------------------
# the h1 > p_g recipe and the twisted lower bounds
# ---------------------------------------------------------------------------

def check_recipe(G, Z, lprime):
    """The two conditions whose conjunction forces h1(Z, L_gen^im(-l')) > p_g:

    (a) t_Z(l') >= chi(-l') - min_{l>=0} chi(-l'+l) + 2,
    (b) -l' <= max M with M = {l > 0 : chi(l) = min chi}.
    """
    _require_effective(Z, "Z")
    _require_ZgeE(G, Z)
    lprime.validate(G)
    minus_lp = lprime.minus_lprime(G)
    t_Z = codim_generic(G, Z, lprime, method="dp")
    eff = min_chi_effective(G, shift=minus_lp, strict=False)
    rhs = chi(G, minus_lp) - eff.value + 2
    cond_a = t_Z >= rhs
    effM = min_chi_effective(G, shift=ZERO, strict=True)
    rep = max_of_minimizer_set(G, effM.cap, shift=ZERO)
    cond_b = minus_lp.le(rep.max)
    return cond_a, cond_b


def twisted_h1_lower_bounds(G, Z, lprime, l=None):
    """Exact value of the bound h1(Z, L_gen^im(l)) >= t_Z(l') - chi(-l') + chi(-l'-l).

    With l omitted the twist is l = -l' (which must then be integral), the
    case producing line bundles in Pic^0 with h1 above p_g.
    """
    _require_effective(Z, "Z")
    _require_ZgeE(G, Z)
    lprime.validate(G)
    minus_lp = lprime.minus_lprime(G)
    if l is None:
        if not minus_lp.is_integral():
            raise NonIntegralShift("-l' is not an integral cycle; pass l explicitly")
        l = minus_lp
    _require_effective(l, "l")
    t_Z = codim_generic(G, Z, lprime, method="dp")
    val = t_Z - chi(G, minus_lp) + chi(G, minus_lp - l)
    if isinstance(val, Fraction):
        assert val.denominator == 1
        val = int(val)
    return val


# ---------------------------------------------------------------------------
# aggregated report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    d: int
    codim: int
    T: int
    t: int
    t_Z: int
    dominant: bool
    constant: bool


def bound_report(G, Z, lprime):
    """All cross-identities asserted before returning (they are theorems)."""
    h1Z = h1_generic(G, Z)
    d_dir = d_generic(G, Z, lprime, method="direct")
    d_f3 = d_generic(G, Z, lprime, method="form3")
    if d_dir != d_f3:
        raise InconsistentOracle(f"method disagreement: direct={d_dir}, form3={d_f3}")
    cod = codim_generic(G, Z, lprime, method="dp")
    T = bound_T(G, Z, lprime)
    t = bound_t(G, Z, lprime, method="reduced")
    dom = is_dominant(G, Z, lprime)
    if d_dir + cod != h1Z:
        raise InconsistentOracle("d + codim != h1(O_Z)")
    if t != cod:
        raise InconsistentOracle("t(Z,l') != t_Z(l')")
    if T > t:
        raise InconsistentOracle("T(Z,l') > t(Z,l')")
    return BoundReport(d=d_dir, codim=cod, T=T, t=t, t_Z=cod,
                       dominant=dom, constant=(d_dir == 0))
