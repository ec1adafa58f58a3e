"""Plumbing graphs and their intersection lattices, in exact arithmetic.

A plumbing graph here is a tree of rational curves decorated with
self-intersection numbers whose intersection matrix I (I_vv = e_v,
I_vw = 1 on edges) is negative definite.  Cycles live in the lattice L
spanned by the E_v; rational cycles in the dual lattice L' are spanned by
the dual classes E_v* with (E_v*, E_w) = -delta_vw.  Everything is computed
over Z or Q (fractions.Fraction); no floating point is used anywhere.

Conventions:
  chi(x)   = -(x, x - Z_K)/2  with Z_K the (anti)canonical solution of
             (Z_K, E_v) = e_v + 2,
  Lipman cone S' = { x : (x, E_v) <= 0 for all v }.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import (
    DuplicateEdge,
    NotATree,
    NotInLipmanCone,
    NotNegativeDefinite,
    VertexMismatch,
)


def _norm(q):
    """Collapse Fractions with denominator 1 to int."""
    if isinstance(q, Fraction) and q.denominator == 1:
        return int(q)
    return q


class Cycle:
    """Sparse exact vector over the vertex set (element of L or of L-tensor-Q).

    Zero coefficients are never stored, so equality and hashing are
    support-based.  Instances are immutable; all operations return new cycles.
    Integer-valued cycles model L, Fraction-valued ones model L' (QCycle).
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for v, x in coeffs.items():
                x = _norm(x)
                if x != 0:
                    c[v] = x
        object.__setattr__(self, "_c", c)

    def __setattr__(self, *a):
        raise AttributeError("Cycle is immutable")

    # -- access --------------------------------------------------------

    def __getitem__(self, v):
        return self._c.get(v, 0)

    def items(self):
        return self._c.items()

    def support(self):
        return frozenset(self._c)

    def is_zero(self):
        return not self._c

    def is_integral(self):
        return all(not isinstance(x, Fraction) for x in self._c.values())

    def is_effective(self):
        return all(x >= 0 for x in self._c.values())

    # -- algebra -------------------------------------------------------

    def __add__(self, other):
        c = dict(self._c)
        for v, x in other._c.items():
            c[v] = c.get(v, 0) + x
        return Cycle(c)

    def __sub__(self, other):
        c = dict(self._c)
        for v, x in other._c.items():
            c[v] = c.get(v, 0) - x
        return Cycle(c)

    def __neg__(self):
        return Cycle({v: -x for v, x in self._c.items()})

    def __mul__(self, k):
        return Cycle({v: x * k for v, x in self._c.items()})

    __rmul__ = __mul__

    def meet(self, other):
        keys = set(self._c) | set(other._c)
        return Cycle({v: min(self[v], other[v]) for v in keys})

    def join(self, other):
        keys = set(self._c) | set(other._c)
        return Cycle({v: max(self[v], other[v]) for v in keys})

    def le(self, other):
        """Componentwise <= (the natural partial order on cycles)."""
        for v in set(self._c) | set(other._c):
            if self[v] > other[v]:
                return False
        return True

    def restrict(self, keep):
        return Cycle({v: x for v, x in self._c.items() if v in keep})

    def floor(self):
        return Cycle({v: x.numerator // x.denominator if isinstance(x, Fraction) else x
                      for v, x in self._c.items()})

    def ceil(self):
        return Cycle({v: -((-x.numerator) // x.denominator) if isinstance(x, Fraction) else x
                      for v, x in self._c.items()})

    def pos_part(self):
        return Cycle({v: x for v, x in self._c.items() if x > 0})

    # -- hashing / repr --------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Cycle) and self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __repr__(self):
        if not self._c:
            return "Cycle(0)"
        body = ", ".join(f"{v}:{x}" for v, x in sorted(self._c.items(), key=lambda t: str(t[0])))
        return f"Cycle({body})"

    def key(self, graph):
        """Dense coefficient tuple in graph vertex order (cache key)."""
        return tuple(self._c.get(v, 0) for v in graph.vertices)

    def to_json_dict(self):
        out = {}
        for v, x in self._c.items():
            out[str(v)] = f"{x.numerator}/{x.denominator}" if isinstance(x, Fraction) else x
        return out


QCycle = Cycle  # rational cycles share the representation; integrality is checked where it matters

ZERO = Cycle()


def cycle(coeffs):
    c = Cycle(coeffs)
    if not c.is_integral():
        raise ValueError("integer cycle expected")
    return c


class PlumbingGraph:
    """Validated plumbing tree with negative definite intersection form.

    Treat instances as immutable.  Construction is through build_graph, which
    runs the tree and definiteness checks; derived data (Z_K, duals, Laufer
    cycle, determinant) is cached lazily.
    """

    def __init__(self, vertices, self_int, edges):
        self.vertices = tuple(vertices)
        self.self_int = dict(self_int)
        self.edges = tuple(edges)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        adj = {v: [] for v in self.vertices}
        for u, w in self.edges:
            adj[u].append(w)
            adj[w].append(u)
        self.adj = {v: tuple(ns) for v, ns in adj.items()}
        self._cache = {}

    def __contains__(self, v):
        return v in self.index

    def __len__(self):
        return len(self.vertices)

    def check_vertex(self, v):
        if v not in self.index:
            raise VertexMismatch(f"vertex {v!r} not in graph")

    def check_cycle(self, x):
        for v in x.support():
            self.check_vertex(v)

    def unit(self, v):
        self.check_vertex(v)
        return Cycle({v: 1})

    def reduced_cycle(self, J=None):
        """E_J = sum of E_v over J (whole vertex set by default)."""
        if J is None:
            J = self.vertices
        return Cycle({v: 1 for v in J})

    def content_key(self):
        return (self.vertices,
                tuple(self.self_int[v] for v in self.vertices),
                self.edges)


# ---------------------------------------------------------------------------
# construction / validation
# ---------------------------------------------------------------------------

def _check_negative_definite(G):
    # -I must be positive definite: exact LU pivots (ratios of leading
    # principal minors) must all be positive.  A zero pivot means some
    # leading minor vanishes, which also fails definiteness.
    n = len(G.vertices)
    A = [[Fraction(0)] * n for _ in range(n)]
    for v in G.vertices:
        A[G.index[v]][G.index[v]] = Fraction(-G.self_int[v])
    for u, w in G.edges:
        A[G.index[u]][G.index[w]] = Fraction(-1)
        A[G.index[w]][G.index[u]] = Fraction(-1)
    det = Fraction(1)
    for k in range(n):
        piv = A[k][k]
        if piv <= 0:
            raise NotNegativeDefinite(
                f"leading principal minor {k + 1} of -I is not positive")
        det *= piv
        for r in range(k + 1, n):
            if A[r][k]:
                f = A[r][k] / piv
                Ar, Ak = A[r], A[k]
                for c in range(k, n):
                    Ar[c] -= f * Ak[c]
    G._cache["det"] = int(det)


def build_graph(vertices, edges):
    """Build and validate a plumbing graph.

    vertices: iterable of (id, e) pairs with integer decorations e;
    edges: iterable of {u, w} pairs.  Raises DuplicateEdge, VertexMismatch,
    NotATree or NotNegativeDefinite.
    """
    vlist, self_int = [], {}
    for v, e in vertices:
        if v in self_int:
            raise VertexMismatch(f"vertex {v!r} listed twice")
        vlist.append(v)
        self_int[v] = int(e)
    if not vlist:
        raise NotATree("graph needs at least one vertex")

    seen, elist = set(), []
    for u, w in edges:
        if u not in self_int or w not in self_int:
            raise VertexMismatch(f"edge ({u!r},{w!r}) uses unknown vertex")
        if u == w:
            raise NotATree(f"self-edge at {u!r}")
        key = frozenset((u, w))
        if key in seen:
            raise DuplicateEdge(f"edge ({u!r},{w!r}) listed twice")
        seen.add(key)
        elist.append((u, w))

    G = PlumbingGraph(vlist, self_int, elist)

    if len(elist) != len(vlist) - 1:
        raise NotATree(f"{len(vlist)} vertices need {len(vlist) - 1} edges, got {len(elist)}")
    reached = {vlist[0]}
    stack = [vlist[0]]
    while stack:
        for w in G.adj[stack.pop()]:
            if w not in reached:
                reached.add(w)
                stack.append(w)
    if len(reached) != len(vlist):
        raise NotATree("graph is not connected")

    _check_negative_definite(G)
    return G


def determinant(G):
    """det(-I) = |L'/L|, the order of the discriminant group."""
    return G._cache["det"]


# ---------------------------------------------------------------------------
# pairing, chi, duals
# ---------------------------------------------------------------------------

def pairing(G, x, y):
    """Intersection pairing (x, y); exact, bilinear, symmetric."""
    G.check_cycle(x)
    G.check_cycle(y)
    tot = 0
    for v, xv in x.items():
        s = G.self_int[v] * y[v]
        for w in G.adj[v]:
            s += y[w]
        tot += xv * s
    return _norm(tot)


def pair_with_vertex(G, x, v):
    """(x, E_v) without building the unit cycle."""
    s = G.self_int[v] * x[v]
    for w in G.adj[v]:
        s += x[w]
    return _norm(s)


def _solve(G, rhs):
    # solve I * z = rhs exactly (I nondegenerate by definiteness)
    n = len(G.vertices)
    A = [[Fraction(0)] * (n + 1) for _ in range(n)]
    for v in G.vertices:
        A[G.index[v]][G.index[v]] = Fraction(G.self_int[v])
    for u, w in G.edges:
        A[G.index[u]][G.index[w]] = Fraction(1)
        A[G.index[w]][G.index[u]] = Fraction(1)
    for i, b in enumerate(rhs):
        A[i][n] = Fraction(b)
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [t / piv for t in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [t - f * s for t, s in zip(A[r], A[c])]
    return Cycle({v: A[G.index[v]][n] for v in G.vertices})


def canonical_cycle(G):
    """Z_K in L': the unique solution of (Z_K, E_v) = e_v + 2 for all v."""
    if "zk" not in G._cache:
        G._cache["zk"] = _solve(G, [G.self_int[v] + 2 for v in G.vertices])
    return G._cache["zk"]


def dual_cycle(G, v):
    """E_v* in L': (E_v*, E_w) = -delta_vw.  All coordinates are > 0."""
    G.check_vertex(v)
    key = ("dual", v)
    if key not in G._cache:
        rhs = [0] * len(G.vertices)
        rhs[G.index[v]] = -1
        G._cache[key] = _solve(G, rhs)
    return G._cache[key]


def chi(G, x):
    """Riemann-Roch expression chi(x) = -(x, x - Z_K)/2.

    For integral x this avoids Z_K entirely via (x, Z_K) = sum x_v (e_v + 2),
    so the whole computation stays in machine/bignum integers.
    """
    G.check_cycle(x)
    if x.is_integral():
        xzk = sum(xv * (G.self_int[v] + 2) for v, xv in x.items())
        val = -(pairing(G, x, x) - xzk)
        assert val % 2 == 0
        return val // 2
    zk = canonical_cycle(G)
    return _norm(-Fraction(pairing(G, x, x) - pairing(G, x, zk)) / 2)


def in_lipman_cone(G, x):
    """True iff x is antinef: (x, E_v) <= 0 for every vertex."""
    return all(pair_with_vertex(G, x, v) <= 0 for v in G.vertices)


def in_dual_lattice(G, x):
    """Membership in L': all pairings with basis cycles are integers."""
    for v in G.vertices:
        p = pair_with_vertex(G, x, v)
        if isinstance(p, Fraction):
            return False
    return True


# ---------------------------------------------------------------------------
# supports, restrictions, components
# ---------------------------------------------------------------------------

def support(x):
    return x.support()


def restrict(x, J):
    return x.restrict(J)


def components(G, J):
    """Connected components of the subgraph induced on J, sorted for determinism."""
    J = set(J)
    for v in J:
        G.check_vertex(v)
    out, seen = [], set()
    for v in G.vertices:
        if v in J and v not in seen:
            comp, stack = {v}, [v]
            seen.add(v)
            while stack:
                for w in G.adj[stack.pop()]:
                    if w in J and w not in seen:
                        seen.add(w)
                        comp.add(w)
                        stack.append(w)
            out.append(frozenset(comp))
    return out


# ---------------------------------------------------------------------------
# E*-combinations (Chern-class data)
# ---------------------------------------------------------------------------

class EStarCombination:
    """Coefficients a_v >= 0 of -l' = sum a_v E_v*; the usual Chern-class input.

    The E*-support is I = {v : a_v != 0}.  Pairings against integral cycles
    need no linear algebra: (l', Z) = sum a_v Z_v.
    """

    __slots__ = ("a",)

    def __init__(self, a):
        clean = {}
        for v, n in (a or {}).items():
            n = int(n)
            if n < 0:
                raise NotInLipmanCone(f"a_{v!r} = {n} < 0, so -l' is outside S'")
            if n:
                clean[v] = n
        object.__setattr__(self, "a", clean)

    def __setattr__(self, *a):
        raise AttributeError("EStarCombination is immutable")

    def validate(self, G):
        for v in self.a:
            G.check_vertex(v)
        return self

    def est_support(self):
        return frozenset(self.a)

    def total(self):
        return sum(self.a.values())

    def minus_lprime(self, G):
        """-l' as an explicit QCycle (in S' by construction)."""
        out = ZERO
        for v, n in self.a.items():
            out = out + n * dual_cycle(G, v)
        return out

    def lprime_dot(self, z):
        """(l', z) = sum a_v z_v, exact and lattice-free."""
        return _norm(sum(n * z[v] for v, n in self.a.items()))

    def __eq__(self, other):
        return isinstance(other, EStarCombination) and self.a == other.a

    def __hash__(self):
        return hash(frozenset(self.a.items()))

    def __repr__(self):
        return f"EStarCombination({self.a!r})"

    def key(self, graph):
        return tuple(self.a.get(v, 0) for v in graph.vertices)


def estar_combination_of(G, x):
    """Write an antinef x in L' as sum a_v E_v* with a_v = -(x, E_v) >= 0."""
    a = {}
    for v in G.vertices:
        p = pair_with_vertex(G, x, v)
        if isinstance(p, Fraction):
            raise NotInLipmanCone(f"{x!r} is not in L'")
        if p > 0:
            raise NotInLipmanCone(f"(x, E_{v!r}) = {p} > 0, x is not antinef")
        if p:
            a[v] = -p
    return EStarCombination(a)


# ---------------------------------------------------------------------------
# generic blow-up
# ---------------------------------------------------------------------------

class BlowupMap:
    """One generic-point blow-up; pullback pi* preserves all pairings."""

    __slots__ = ("source", "target", "center", "new_vertex")

    def __init__(self, source, target, center, new_vertex):
        self.source = source
        self.target = target
        self.center = center
        self.new_vertex = new_vertex

    def pullback(self, x):
        """pi*(E_center) = E_center + E_new, identity on the other E_v."""
        self.source.check_cycle(x)
        xc = x[self.center]
        if xc == 0:
            return x
        return x + Cycle({self.new_vertex: xc})


def blow_up_generic(G, v, new_id=None):
    """Blow up a generic point of E_v: new (-1)-vertex attached to v, e_v -= 1."""
    G.check_vertex(v)
    if new_id is None:
        k = len(G.vertices)
        while f"_w{k}" in G.index:
            k += 1
        new_id = f"_w{k}"
    if new_id in G.index:
        raise VertexMismatch(f"new vertex id {new_id!r} already present")
    verts = [(u, G.self_int[u] - (1 if u == v else 0)) for u in G.vertices]
    verts.append((new_id, -1))
    edges = list(G.edges) + [(v, new_id)]
    G2 = build_graph(verts, edges)
    return G2, BlowupMap(G, G2, v, new_id)


# ---------------------------------------------------------------------------
# JSON formats (shared by the CLI)
# ---------------------------------------------------------------------------

def graph_from_json_dict(data):
    try:
        verts = [(v["id"], v["e"]) for v in data["vertices"]]
        edges = [tuple(e) for e in data.get("edges", [])]
    except (KeyError, TypeError) as exc:
        raise VertexMismatch(f"malformed graph JSON: {exc}") from exc
    return build_graph(verts, edges)


def graph_to_json_dict(G):
    return {
        "vertices": [{"id": v, "e": G.self_int[v]} for v in G.vertices],
        "edges": [[u, w] for u, w in G.edges],
    }


def _parse_coeff(x):
    if isinstance(x, str):
        return _norm(Fraction(x))
    if isinstance(x, int):
        return x
    raise ValueError(f"coefficient {x!r} is not exact (use ints or 'p/q' strings)")


def cycle_from_json_dict(data, G=None):
    c = Cycle({v: _parse_coeff(x) for v, x in data.items()})
    if G is not None:
        G.check_cycle(c)
    return c


def estar_from_json_dict(data, G=None):
    comb = EStarCombination({v: int(x) for v, x in data.items()})
    if G is not None:
        comb.validate(G)
    return comb


def load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
