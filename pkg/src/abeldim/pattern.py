"""Blow-up towers and the Pattern Theorem induction for Abel-map dimensions.

The induction variable is a tuple s = {s_{v,k}} indexed by a_v generic points
on each E_v with a_v > 0 (where -l' = sum a_v E_v*); s_{v,k} counts how many
times the k-th point has been blown up, bounded by the multiplicity m_v of
max(0, floor(Z_K)).  A test function is any upper bound tau_s >= d_s with the
testing property; the decreasing induction

    d_s = max over (v,k) of d_{s^{v,k}},            if those differ,
    d_s = d            when all equal d = tau_s,
    d_s = d + 1        when all equal d != tau_s,

recovers every d_s from tau, and so does the closed form
d_s = min_{s <= s~ <= m} { |s~ - s| + tau_{s~} }.

Built-in test functions: e_s (the stable Abel-map dimension on the tower,
evaluated with generic h1 on the blown-up graph) and h1(O_Z) - g_s with
g_s = h1(O_{l_s}) on the base graph.  Since all blown-up points on a fixed
E_v are generic, d_s only depends on the multiset {s_{v,k}}_k per vertex, and
the engine canonicalizes accordingly.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product

from . import config
from .errors import BoxTooLarge, GridTooLarge, InconsistentOracle, OracleDomainViolation
from .generic import box_sweep, h1_generic, is_dominant
from .lattice import Cycle, EStarCombination, ZERO, blow_up_generic, canonical_cycle


class MultiIndex:
    """The s-tuple: map (v, k) -> s_{v,k} with 1 <= k <= a_v."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        object.__setattr__(self, "entries", dict(entries))

    def __setattr__(self, *a):
        raise AttributeError("MultiIndex is immutable")

    def total(self):
        return sum(self.entries.values())

    def bump(self, v, k):
        e = dict(self.entries)
        e[(v, k)] = e.get((v, k), 0) + 1
        return MultiIndex(e)

    def __eq__(self, other):
        return isinstance(other, MultiIndex) and self.entries == other.entries

    def __hash__(self):
        return hash(frozenset(self.entries.items()))

    def __repr__(self):
        return f"MultiIndex({self.entries!r})"


def stabilization_bound(G, lprime=None):
    """m_v = E_v-multiplicity of max(0, floor(Z_K)) for every vertex."""
    m = canonical_cycle(G).floor().pos_part()
    return {v: m[v] for v in G.vertices}


def l_s_cycle(G, Z, lprime, s):
    """l_s = min( sum_v min_k s_{v,k} E_v , Z ).

    At vertices with a_v = 0 the inner min over an empty index set is +infty,
    so the coefficient clamps to Z_v; this is forced by the closed forms
    (at l' = 0, l_s must equal Z so that the test function vanishes).
    """
    blocks = _blocks_of(s, lprime)
    out = {}
    for v in G.vertices:
        if v in blocks:
            out[v] = min(min(blocks[v]), Z[v])
        else:
            out[v] = Z[v]
    return Cycle(out)


def _blocks_of(s, lprime):
    """Vertex -> tuple of s-values, from a MultiIndex, dict or canonical tuple."""
    if isinstance(s, MultiIndex):
        raw = s.entries
    elif isinstance(s, dict):
        raw = s
    else:  # canonical: tuple of (v, values) pairs
        return {v: tuple(vals) for v, vals in s}
    blocks = {}
    for (v, _k), t in sorted(raw.items(), key=lambda kv: str(kv[0])):
        blocks.setdefault(v, []).append(t)
    # vertices with a_v > 0 but absent from s still carry zero blocks
    for v, av in lprime.a.items():
        got = blocks.setdefault(v, [])
        while len(got) < av:
            got.append(0)
    return {v: tuple(vals) for v, vals in blocks.items()}


# ---------------------------------------------------------------------------
# tower construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TowerState:
    graph: object
    Z_s: Cycle
    lprime_s: EStarCombination
    I_s: frozenset
    s: tuple
    base: object
    maps: tuple

    def pullback(self, x):
        for bm in self.maps:
            x = bm.pullback(x)
        return x


def build_tower(G, Z, lprime, s):
    """Blow up a_v generic points on each E_v in |l'|, s_{v,k} times each.

    Each chain hangs off E_v as (-2)^(s-1) ending in (-1); E_v loses 1 from
    its decoration per chain actually blown up.  Entries above m_v are
    clamped (the invariants are constant beyond the stabilization bound).
    """
    lprime.validate(G)
    m = stabilization_bound(G)
    blocks = _blocks_of(s, lprime)
    canon = canonicalize_blocks(G, lprime, blocks, m)

    Gs = G
    maps = []
    ends = []
    for v, vals in canon:
        for k, t in enumerate(vals):
            cur = v
            for j in range(1, t + 1):
                nid = f"{v}|{k}|{j}"
                while nid in Gs.index:
                    nid += "'"
                Gs, bm = blow_up_generic(Gs, cur, new_id=nid)
                maps.append(bm)
                cur = nid
            ends.append(cur)

    Zs = Z
    for bm in maps:
        Zs = bm.pullback(Zs)
    a_s = {}
    for w in ends:
        a_s[w] = a_s.get(w, 0) + 1
    return TowerState(graph=Gs, Z_s=Zs, lprime_s=EStarCombination(a_s),
                      I_s=frozenset(ends), s=canon, base=G, maps=tuple(maps))


def canonicalize_blocks(G, lprime, blocks, m):
    """Sorted per-vertex multisets (generic points are interchangeable)."""
    out = []
    for v in G.vertices:
        av = lprime.a.get(v, 0)
        if av == 0:
            continue
        vals = blocks.get(v, ())
        if len(vals) != av:
            raise ValueError(f"vertex {v!r} needs exactly a_v = {av} entries, got {len(vals)}")
        if any(t < 0 for t in vals):
            raise ValueError("s entries must be nonnegative")
        out.append((v, tuple(sorted(min(t, m[v]) for t in vals))))
    return tuple(out)


# ---------------------------------------------------------------------------
# test functions
# ---------------------------------------------------------------------------

@dataclass
class TestFunction:
    """Oracle s -> tau_s over the grid [0, m], canonicalized per vertex block.

    vertices/counts/bounds describe the grid; fn consumes a canonical s.
    Values are memoized, and the upper-bound/monotonicity contracts are left
    to the induction (violations surface as InconsistentOracle there).
    """

    name: str
    vertices: tuple
    counts: dict
    bounds: dict
    fn: object
    _memo: dict = field(default_factory=dict, repr=False)
    _lock: object = field(default_factory=threading.Lock, repr=False)

    __test__ = False  # keep pytest collection away

    def canonical(self, s):
        if isinstance(s, tuple) and all(isinstance(b, tuple) and len(b) == 2 for b in s):
            blocks = {v: vals for v, vals in s}
        else:
            blocks = _blocks_of(s, _FakeComb(self.counts))
        out = []
        for v in self.vertices:
            vals = blocks.get(v, (0,) * self.counts[v])
            if len(vals) != self.counts[v]:
                raise ValueError(f"block at {v!r} must have {self.counts[v]} entries")
            out.append((v, tuple(sorted(min(int(t), self.bounds[v]) for t in vals))))
        return tuple(out)

    def value(self, s):
        c = self.canonical(s)
        if c not in self._memo:
            val = int(self.fn(c))
            if val < 0:
                raise InconsistentOracle(f"{self.name}: negative value {val} at {c}")
            with self._lock:
                self._memo[c] = val
        return self._memo[c]

    def zero(self):
        return tuple((v, (0,) * self.counts[v]) for v in self.vertices)

    def top(self):
        return tuple((v, (self.bounds[v],) * self.counts[v]) for v in self.vertices)

    def grid_size(self):
        from math import comb
        n = 1
        for v in self.vertices:
            n *= comb(self.bounds[v] + self.counts[v], self.counts[v])
        return n

    def grid(self):
        per_vertex = [
            [(v, c) for c in combinations_with_replacement(range(self.bounds[v] + 1),
                                                           self.counts[v])]
            for v in self.vertices
        ]
        for combo in product(*per_vertex):
            yield tuple(combo)

    @staticmethod
    def from_table(vertices, counts, bounds, table, name="table"):
        tf = TestFunction(name=name, vertices=tuple(vertices), counts=dict(counts),
                          bounds=dict(bounds), fn=None)
        tf.fn = lambda c: table[c]
        return tf


class _FakeComb:
    def __init__(self, counts):
        self.a = dict(counts)


def _grid_spec(G, lprime, m=None):
    m = m if m is not None else stabilization_bound(G)
    vs = tuple(v for v in G.vertices if lprime.a.get(v, 0) > 0)
    counts = {v: lprime.a[v] for v in vs}
    bounds = {v: m[v] for v in vs}
    return vs, counts, bounds


def test_first(G, Z, lprime):
    """First test function: e_s on the tower, with generic h1 on the blown-up graph.

    e_s = h1(O_{Z_s}) - h1(O_{Z_s off I_s}); e_m = 0 because no pole survives
    m_v blow-ups, and e is nonincreasing along the tower.
    """
    vs, counts, bounds = _grid_spec(G, lprime)
    towers = {}

    def fn(canon):
        if canon not in towers:
            towers[canon] = build_tower(G, Z, lprime, canon)
        ts = towers[canon]
        keep = set(ts.graph.vertices) - set(ts.I_s)
        return h1_generic(ts.graph, ts.Z_s) - h1_generic(ts.graph, ts.Z_s.restrict(keep))

    return TestFunction(name="e_s", vertices=vs, counts=counts, bounds=bounds, fn=fn)


def test_second(G, Z, lprime):
    """Second test function: h1(O_Z) - g_s with g_s = h1(O_{l_s}) on the base graph.

    Depends on s only through v -> min_k s_{v,k}.
    """
    vs, counts, bounds = _grid_spec(G, lprime)
    h1Z = h1_generic(G, Z)
    memo = {}

    def fn(canon):
        profile = tuple(min(vals) for _v, vals in canon)
        if profile not in memo:
            ls = l_s_cycle(G, Z, lprime, canon)
            memo[profile] = h1Z - h1_generic(G, ls)
        return memo[profile]

    return TestFunction(name="h1-g_s", vertices=vs, counts=counts, bounds=bounds, fn=fn)


# ---------------------------------------------------------------------------
# the induction and the closed form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DimensionTable:
    entries: dict
    bounds: dict
    provenance: str

    def at(self, tau, s):
        return self.entries[tau.canonical(s)]

    def d0(self, tau):
        return self.entries[tau.zero()]


def _successors(tau, canon):
    out = []
    for bi, (v, vals) in enumerate(canon):
        for x in sorted(set(vals)):
            if x < tau.bounds[v]:
                lst = list(vals)
                lst[lst.index(x)] = x + 1
                succ = canon[:bi] + ((v, tuple(sorted(lst))),) + canon[bi + 1:]
                out.append(succ)
    return out


def run_pattern_induction(tau, grid_cap=None):
    """Fill the whole grid [0, m] by the decreasing Pattern Theorem induction.

    Base point: d_m = tau_m (zero for both built-ins).  Raises
    InconsistentOracle if the produced table would violate the step-by-one
    law or the bound d <= tau, i.e. if tau is not a test function.
    """
    cap = grid_cap if grid_cap is not None else config.GRID_POINT_CAP
    size = tau.grid_size()
    if size > cap:
        raise GridTooLarge(f"grid has {size} points, cap {cap}")

    pts = sorted(tau.grid(), key=_abs_s, reverse=True)
    d = {}
    for s in pts:
        succs = _successors(tau, s)
        if not succs:
            d[s] = tau.value(s)
            continue
        vals = {d[t] for t in succs}
        if max(vals) - min(vals) > 1:
            raise InconsistentOracle(f"successor gap outside {{0,1}} at {s}")
        if len(vals) > 1:
            d[s] = max(vals)
        else:
            common = vals.pop()
            ts = tau.value(s)
            if ts < common:
                raise InconsistentOracle(
                    f"tau({s}) = {ts} < inherited dimension {common}; not an upper bound")
            d[s] = common if ts == common else common + 1
    return DimensionTable(entries=d, bounds=dict(tau.bounds), provenance=tau.name)


def _abs_s(canon):
    return sum(sum(vals) for _v, vals in canon)


def closed_form_min(tau, s=None, grid_cap=None):
    """min over s <= s~ <= m of |s~ - s| + tau(s~); equals the induction value."""
    cap = grid_cap if grid_cap is not None else config.GRID_POINT_CAP
    if tau.grid_size() > cap:
        raise GridTooLarge(f"grid has {tau.grid_size()} points, cap {cap}")
    base = tau.canonical(s) if s is not None else tau.zero()
    base_abs = _abs_s(base)
    lower = {v: vals for v, vals in base}

    def dominating_blocks(v):
        b = lower[v]
        m = tau.bounds[v]
        out = []

        def rec(i, minval, acc):
            if i == len(b):
                out.append(tuple(acc))
                return
            for c in range(max(b[i], minval), m + 1):
                acc.append(c)
                rec(i + 1, c, acc)
                acc.pop()

        rec(0, 0, [])
        return [(v, blk) for blk in out]

    best = None
    for combo in product(*(dominating_blocks(v) for v in tau.vertices)):
        st = tuple(combo)
        val = _abs_s(st) - base_abs + tau.value(st)
        if best is None or val < best:
            best = val
    return best


# ---------------------------------------------------------------------------
# twisted dimension d_{L0, Z}(l')
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwistedDim:
    d: int
    codim: int
    h1_L0_Z: int


def twisted_d(G, Z, lprime, lprime0, oracle="generic-image", volume_cap=None):
    """d_{L0,Z}(l') = min_{0<=Z1<=Z} { (l',Z1) + h1(Z,L0) - h1(Z1,L0) }.

    Built-in h1(.,L0) evaluators: "generic" uses the generic-bundle formula
    chi(-l'0) - min chi(-l'0 + l) and is only a lawful image-bundle stand-in
    when c^{l'0}(Z) is dominant (OracleDomainViolation otherwise);
    "generic-image" uses the codimension formula max { h1(O_Z2) - (l'0,Z2) }
    at every level, with generic h1.  A callable (G, Cycle) -> int may be
    supplied instead.  Also reports the twisted codimension
    max { h1(Z1,L0) - (l',Z1) }.
    """
    from .generic import _require_effective, _require_ZgeE
    _require_effective(Z, "Z")
    _require_ZgeE(G, Z)
    lprime.validate(G)
    lprime0.validate(G)

    sweep = box_sweep(G, Z)
    n = len(sweep.verts)
    a = [lprime.a.get(v, 0) for v in sweep.verts]

    if oracle == "generic":
        if not is_dominant(G, Z, lprime0):
            raise OracleDomainViolation(
                "generic-bundle oracle requires c^{l'_0}(Z) dominant")
        nu0, _ = sweep.shifted_tables(lprime0)
        h1L0 = {u: -nu0[u] for u in sweep.tuples()}
    elif oracle == "generic-image":
        a0 = [lprime0.a.get(v, 0) for v in sweep.verts]
        h1L0 = {}
        for u in sweep.tuples():
            best = sweep.h1(u) - sum(a0[i] * u[i] for i in range(n))
            for i in range(n):
                if u[i] >= 1:
                    prev = h1L0[u[:i] + (u[i] - 1,) + u[i + 1:]]
                    if prev > best:
                        best = prev
            h1L0[u] = best
    elif callable(oracle):
        h1L0 = {u: int(oracle(G, sweep.cycle(u))) for u in sweep.tuples()}
    else:
        raise ValueError(f"unknown oracle {oracle!r}")

    top = tuple(Z[v] for v in sweep.verts)
    h1Z = h1L0[top]
    codim = 0
    for u in sweep.tuples():
        val = h1L0[u] - sum(a[i] * u[i] for i in range(n))
        if val > codim:
            codim = val
    return TwistedDim(d=h1Z - codim, codim=codim, h1_L0_Z=h1Z)
