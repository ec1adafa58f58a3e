"""Exact minimization of chi over integer boxes and the effective cone.

The objective l |-> chi(shift + l) on a box decomposes as a constant plus
sum_v f_v(l_v) - sum_edges l_u l_w (after translating the box to its lower
corner), i.e. a per-coordinate convex quadratic with nonpositive coupling
only along tree edges.  Minimization is therefore exact dynamic programming
over the tree; the minimizer set is a sublattice (the coupling makes the
objective submodular), so the componentwise-least and -greatest minimizers
exist and drop out of the same DP by tie-breaking low/high during backtrack.

Single-step coordinate descent is *not* sound for this objective (from l = 0
every single +E_v move increases chi even when min chi < 0), which is why the
DP is the primary algorithm and brute enumeration the certifying oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from . import config
from .errors import BoxTooLarge, EmptyBox, NoConvergence
from .lattice import Cycle, ZERO, chi, components, pair_with_vertex


@dataclass(frozen=True)
class Box:
    """Integer box {l : lower <= l <= upper}; absent coefficients are 0."""

    lower: Cycle
    upper: Cycle

    def domain(self):
        """(vertex, lo, hi) triples over the union of supports."""
        out = []
        for v in sorted(self.lower.support() | self.upper.support(), key=str):
            out.append((v, self.lower[v], self.upper[v]))
        return out

    def volume(self):
        n = 1
        for _, lo, hi in self.domain():
            n *= hi - lo + 1
        return n

    def contains(self, x):
        return self.lower.le(x) and x.le(self.upper)


@dataclass(frozen=True)
class MinChiResult:
    value: object          # exact int or Fraction
    min_minimizer: Cycle
    max_minimizer: Cycle


def _check_box(G, box):
    G.check_cycle(box.lower)
    G.check_cycle(box.upper)
    if not (box.lower.is_integral() and box.upper.is_integral()):
        raise EmptyBox("box corners must be integral cycles")
    for v, lo, hi in box.domain():
        if lo > hi:
            raise EmptyBox(f"lower > upper at vertex {v!r}")


def _node_cost_table(G, v, p_v, lo, hi):
    # f(y) = chi((lo+y)E_v) - chi(lo E_v) folded into base, i.e. in y-space:
    # chi(y E_v) - p_v*y, where p_v = (base, E_v).
    e = G.self_int[v]
    return [(y * (e + 2 - y * e)) // 2 - p_v * y if isinstance(p_v, int)
            else Fraction(y * (e + 2 - y * e), 2) - p_v * y
            for y in range(hi - lo + 1)]


def _forest_dp(G, dom, base):
    """Minimize sum f_v(y_v) - sum_edges y_u y_w over 0 <= y_v <= r_v.

    Returns (min value, y_min dict, y_max dict); y_min / y_max are the
    lattice-least/-greatest minimizers.
    """
    verts = [v for v, lo, hi in dom if hi > lo]
    rng = {v: hi - lo for v, lo, hi in dom if hi > lo}
    low = {v: lo for v, lo, hi in dom}
    vset = set(verts)

    p = {}
    for v in verts:
        pv = pair_with_vertex(G, base, v)
        # neighbours inside the variable set contribute through edge terms,
        # already-fixed neighbours are part of base
        p[v] = pv

    cost = {v: _node_cost_table(G, v, p[v], 0, rng[v]) for v in verts}

    total = 0
    y_min, y_max = {}, {}
    for comp in components(G, vset):
        order = sorted(comp, key=lambda u: G.index[u])
        root = order[0]
        parent, post = {root: None}, []
        stack = [root]
        seen = {root}
        while stack:
            u = stack.pop()
            post.append(u)
            for w in G.adj[u]:
                if w in comp and w not in seen:
                    seen.add(w)
                    parent[w] = u
                    stack.append(w)
        post.reverse()  # children before parents

        children = {u: [] for u in comp}
        for u in comp:
            if parent[u] is not None:
                children[parent[u]].append(u)

        table = {}
        for u in post:
            t = list(cost[u])
            for c in children[u]:
                tc = table[c]
                rc = rng[c]
                for y in range(rng[u] + 1):
                    best = tc[0]
                    for yc in range(1, rc + 1):
                        cand = tc[yc] - y * yc
                        if cand < best:
                            best = cand
                    t[y] = t[y] + best
            table[u] = t

        troot = table[root]
        best = min(troot)
        total += best

        for tie_high, out in ((False, y_min), (True, y_max)):
            pick = {}
            idxs = range(len(troot) - 1, -1, -1) if tie_high else range(len(troot))
            pick[root] = next(y for y in idxs if troot[y] == best)
            stack = [root]
            while stack:
                u = stack.pop()
                for c in children[u]:
                    tc = table[c]
                    yu = pick[u]
                    vals = [tc[yc] - yu * yc for yc in range(rng[c] + 1)]
                    b = min(vals)
                    idxs = range(len(vals) - 1, -1, -1) if tie_high else range(len(vals))
                    pick[c] = next(yc for yc in idxs if vals[yc] == b)
                    stack.append(c)
            out.update(pick)

    return total, {v: y_min.get(v, 0) + low[v] for v in low}, \
           {v: y_max.get(v, 0) + low[v] for v in low}


def min_chi_box(G, shift, box):
    """Exact global minimum of l |-> chi(shift + l) over the box.

    Returns the value together with the minimal and maximal minimizers
    (which exist because the minimizer set of a submodular objective over a
    box is a sublattice).
    """
    _check_box(G, box)
    base = shift + box.lower
    dp, ymin, ymax = _forest_dp(G, box.domain(), base)
    val = chi(G, base) + dp
    if isinstance(val, Fraction) and val.denominator == 1:
        val = int(val)
    return MinChiResult(val, Cycle(ymin), Cycle(ymax))


def brute_min_chi_box(G, shift, box, volume_cap=None, return_set=False):
    """Exhaustive-enumeration oracle for min_chi_box.

    Guarded by a box-volume cap (BoxTooLarge).  With return_set=True the full
    minimizer set is returned as a frozenset of Cycles.
    """
    _check_box(G, box)
    cap = volume_cap if volume_cap is not None else config.enum_cap()
    vol = box.volume()
    if vol > cap:
        raise BoxTooLarge(f"box volume {vol} exceeds cap {cap}")

    base = shift + box.lower
    dom = [(v, lo, hi) for v, lo, hi in box.domain() if hi > lo]
    fixed = {v: lo for v, lo, hi in box.domain()}
    if not dom:
        l = Cycle(fixed)
        res = MinChiResult(chi(G, shift + l), l, l)
        return (res, frozenset({l})) if return_set else res

    verts = [v for v, _, _ in dom]
    p = {v: pair_with_vertex(G, base, v) for v in verts}
    exact_ints = all(isinstance(p[v], int) for v in verts)
    edge_pairs = [(verts.index(u), verts.index(w)) for u, w in G.edges
                  if u in p and w in p]

    shape = tuple(hi - lo + 1 for _, lo, hi in dom)
    if exact_ints and _int64_safe(G, dom, p):
        F = np.zeros(shape, dtype=np.int64)
        for i, (v, lo, hi) in enumerate(dom):
            t = np.array(_node_cost_table(G, v, p[v], lo, hi), dtype=np.int64)
            F += t.reshape([-1 if j == i else 1 for j in range(len(dom))])
        for i, j in edge_pairs:
            yi = np.arange(shape[i]).reshape([-1 if k == i else 1 for k in range(len(dom))])
            yj = np.arange(shape[j]).reshape([-1 if k == j else 1 for k in range(len(dom))])
            F -= yi * yj
        best = int(F.min())
        rows = np.argwhere(F == best)
        mins = [tuple(int(t) for t in r) for r in rows]
    else:
        best, mins = None, []
        for ys in product(*(range(hi - lo + 1) for _, lo, hi in dom)):
            # direct evaluation keeps the fallback simple and exact
            val = sum(_eval_node(G, verts[i], p[verts[i]], ys[i]) for i in range(len(verts)))
            for i, j in edge_pairs:
                val -= ys[i] * ys[j]
            if best is None or val < best:
                best, mins = val, [ys]
            elif val == best:
                mins.append(ys)

    def mk(ys):
        c = dict(fixed)
        for i, (v, lo, hi) in enumerate(dom):
            c[v] = lo + ys[i]
        return Cycle(c)

    cycles = [mk(ys) for ys in mins]
    lo_c = cycles[0]
    hi_c = cycles[0]
    for c in cycles[1:]:
        lo_c = lo_c.meet(c)
        hi_c = hi_c.join(c)
    cset = frozenset(cycles)
    assert lo_c in cset and hi_c in cset, "minimizer set is not a lattice"
    val = chi(G, base) + best
    if isinstance(val, Fraction) and val.denominator == 1:
        val = int(val)
    res = MinChiResult(val, lo_c, hi_c)
    return (res, cset) if return_set else res


def _eval_node(G, v, p_v, y):
    e = G.self_int[v]
    q = y * (e + 2 - y * e)
    if isinstance(p_v, int):
        return q // 2 - p_v * y
    return Fraction(q, 2) - p_v * y


def _int64_safe(G, dom, p):
    bound = 0
    for v, lo, hi in dom:
        r = hi - lo
        bound += (abs(G.self_int[v]) + 2) * (r + 1) ** 2 + abs(p[v]) * (r + 1)
    for u, w in G.edges:
        if u in p and w in p:
            bound += next(hi - lo for v, lo, hi in dom if v == u) * \
                     next(hi - lo for v, lo, hi in dom if v == w)
    return bound < 2 ** 60


# ---------------------------------------------------------------------------
# Laufer's computation sequence
# ---------------------------------------------------------------------------

def laufer_fundamental_cycle(G):
    """The fundamental cycle Z_min: minimal nonzero antinef effective cycle.

    Classical incremental computation: start from the reduced cycle and add
    E_v while (z, E_v) > 0 for some v; negative definiteness terminates it.
    """
    if "zmin" not in G._cache:
        z = dict.fromkeys(G.vertices, 1)
        zc = Cycle(z)
        while True:
            for v in G.vertices:
                if pair_with_vertex(G, zc, v) > 0:
                    z[v] += 1
                    zc = Cycle(z)
                    break
            else:
                break
        G._cache["zmin"] = zc
    return G._cache["zmin"]


def default_cap_cycle(G, mult=4):
    """Stand-in for "Z >> 0": componentwise max(2*ceil(Z_K), mult*Z_min)."""
    from .lattice import canonical_cycle
    zk2 = 2 * canonical_cycle(G).ceil()
    zm = mult * laufer_fundamental_cycle(G)
    return zk2.join(zm)


# ---------------------------------------------------------------------------
# effective-cone minimum (box doubling)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EffectiveMin:
    value: object
    min_minimizer: Cycle
    max_minimizer: Cycle
    cap: Cycle           # stabilized bounding box
    max_is_lattice: bool  # join of minimizers verified to attain the value


def _min_over_effective_box(G, shift, cap, strict):
    if not strict:
        r = min_chi_box(G, shift, Box(ZERO, cap))
        return EffectiveMin(r.value, r.min_minimizer, r.max_minimizer, cap, True)

    # When the full-box minimum undercuts the value at l = 0, the origin is
    # not a minimizer and the box minimizer set *is* the strict one.
    r = min_chi_box(G, shift, Box(ZERO, cap))
    if r.value < chi(G, shift):
        return EffectiveMin(r.value, r.min_minimizer, r.max_minimizer, cap, True)

    # l > 0 means l >= 0 and l != 0: cover the punctured box by the corner
    # boxes {l_v >= 1}; each corner box is a lattice, the union need not be.
    best = None
    results = []
    for v in G.vertices:
        r = min_chi_box(G, shift, Box(G.unit(v), cap))
        results.append(r)
        if best is None or r.value < best:
            best = r.value
    attain = [r for r in results if r.value == best]
    joint = attain[0].max_minimizer
    meet = attain[0].min_minimizer
    for r in attain[1:]:
        joint = joint.join(r.max_minimizer)
        meet = meet.meet(r.min_minimizer)
    max_ok = chi(G, shift + joint) == best
    if not max_ok:
        joint = max(attain, key=lambda r: (sum(x for _, x in r.max_minimizer.items()),
                                           r.max_minimizer.key(G))).max_minimizer
    if chi(G, shift + meet) != best or meet.is_zero():
        meet = min(attain, key=lambda r: (sum(x for _, x in r.min_minimizer.items()),
                                          r.min_minimizer.key(G))).min_minimizer
    return EffectiveMin(best, meet, joint, cap, max_ok)


def min_chi_effective(G, shift=ZERO, strict=False, cap=None, max_doublings=14):
    """Global minimum of chi(shift + l) over l >= 0 (or l > 0 with strict).

    Negative definiteness makes chi coercive, so minimizers stabilize inside
    a finite box; the box is doubled until value and maximal minimizer are
    unchanged for two consecutive doublings.
    """
    c = cap if cap is not None else default_cap_cycle(G)
    key = ("effmin", shift.key(G), bool(strict), c.key(G))
    if key in G._cache:
        return G._cache[key]
    res = _min_over_effective_box(G, shift, c, strict)
    stable = 0
    for _ in range(max_doublings):
        c2 = 2 * c
        nxt = _min_over_effective_box(G, shift, c2, strict)
        if nxt.value == res.value and nxt.max_minimizer == res.max_minimizer:
            stable += 1
        else:
            stable = 0
        c, res = c2, nxt
        if stable >= 2:
            G._cache[key] = res
            return res
    raise NoConvergence(f"effective minimum did not stabilize within {max_doublings} doublings")


# ---------------------------------------------------------------------------
# the maximal element of the minimizer set
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MaxMinimizerReport:
    max: Cycle
    value: object
    certified: bool       # max certified through the corner-box lattice argument
    bfs_max: Cycle
    bfs_complete: bool
    brute_max: object     # Cycle or None when skipped
    brute_checked: bool
    agree: bool


def max_of_minimizer_set(G, bound, shift=ZERO, bfs_cap=None, brute_cap=None):
    """max of M = {l > 0 : chi(shift + l) = min chi} inside the stabilized bound.

    Three routes are compared: the corner-box DP join (certified whenever the
    join attains the minimum), a BFS over chi-preserving unit moves from a
    known minimizer (connectivity of M is not guaranteed), and brute
    enumeration at desk scale.  Any disagreement is reported, not hidden.
    """
    key = ("maxmin", shift.key(G), bound.key(G), bfs_cap, brute_cap)
    if key in G._cache:
        return G._cache[key]
    eff = _min_over_effective_box(G, shift, bound, strict=True)
    m = eff.value

    bfs_cap = bfs_cap if bfs_cap is not None else config.BFS_NODE_CAP
    # dense-tuple BFS with incremental chi: chi(l +- E_v) - chi(l) is a
    # single sparse pairing row, no full re-evaluation
    n = len(G.vertices)
    vlist = G.vertices
    e = [G.self_int[v] for v in vlist]
    nbr = [[G.index[w] for w in G.adj[v]] for v in vlist]
    pshift = [pair_with_vertex(G, shift, v) for v in vlist]
    ub = [bound[v] for v in vlist]

    def row(t, i):
        return pshift[i] + e[i] * t[i] + sum(t[j] for j in nbr[i])

    start = eff.min_minimizer.key(G)
    seen = {start}
    queue = [(start, chi(G, shift + eff.min_minimizer))]
    complete = True
    while queue:
        if len(seen) > bfs_cap:
            complete = False
            break
        cur, c0 = queue.pop()
        for i in range(n):
            r = row(cur, i)
            for step, delta in ((1, 1 - r), (-1, -(e[i] + 1) + r)):
                ti = cur[i] + step
                if ti < 0 or ti > ub[i]:
                    continue
                nxt = cur[:i] + (ti,) + cur[i + 1:]
                if nxt in seen or not any(nxt):
                    continue
                if c0 + delta == m:
                    seen.add(nxt)
                    queue.append((nxt, m))
    joint = tuple(max(t[i] for t in seen) for i in range(n))
    bfs_max = Cycle({vlist[i]: joint[i] for i in range(n) if joint[i]})
    if chi(G, shift + bfs_max) != m:
        best_t = max(seen, key=lambda t: (sum(t), t))
        bfs_max = Cycle({vlist[i]: best_t[i] for i in range(n) if best_t[i]})

    cap = brute_cap if brute_cap is not None else config.enum_cap()
    brute_max, brute_checked = None, False
    vol = Box(ZERO, bound).volume()
    if vol <= cap:
        brute_checked = True
        _, cset = brute_min_chi_box(G, shift, Box(ZERO, bound), volume_cap=cap,
                                    return_set=True)
        strict_set = {l for l in cset if not l.is_zero()}
        if not strict_set:
            # 0 was the sole minimizer of the full box: redo over corner boxes
            strict_set = set()
            for v in G.vertices:
                r, s = brute_min_chi_box(G, shift, Box(G.unit(v), bound),
                                         volume_cap=cap, return_set=True)
                if r.value == m:
                    strict_set |= set(s)
        else:
            strict_set = {l for l in strict_set if chi(G, shift + l) == m}
        bm = ZERO
        for l in strict_set:
            bm = bm.join(l)
        brute_max = bm if bm in strict_set else max(
            strict_set, key=lambda l: (sum(x for _, x in l.items()), l.key(G)))

    candidates = [eff.max_minimizer, bfs_max] + ([brute_max] if brute_checked else [])
    agree = all(c == candidates[0] for c in candidates)
    best = brute_max if brute_checked else eff.max_minimizer
    rep = MaxMinimizerReport(best, m, eff.max_is_lattice, bfs_max, complete,
                             brute_max, brute_checked, agree)
    G._cache[key] = rep
    return rep
