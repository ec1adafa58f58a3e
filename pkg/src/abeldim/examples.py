"""Builtin example graphs, so tests and CLI runs need no fixture files.

ex56: two copies of the 7-vertex branch
        (-3)-(-1)-(-13)-(-1)-(-3)  with a (-2) hanging off each (-1),
joined through a central vertex of decoration -b.  Its fundamental cycle is
(b-2) E_v0* with central multiplicity 1, chi(Z_min) = -3 and min chi = -5.

star: the same construction with any number of branch copies; branches are
non-rational (min chi of a branch is -1), which is the pattern that makes
the component-wise lower bound t exceed the single-piece bound T.
"""

from .lattice import build_graph

_BRANCH = [("a1", -3), ("b1", -1), ("m", -13), ("b2", -1), ("a2", -3),
           ("c1", -2), ("c2", -2)]
_BRANCH_EDGES = [("a1", "b1"), ("b1", "m"), ("m", "b2"), ("b2", "a2"),
                 ("b1", "c1"), ("b2", "c2")]


def star_graph(branches=2, b=30):
    if branches < 1:
        raise ValueError("need at least one branch")
    verts, edges = [], []
    for i in range(1, branches + 1):
        verts += [(f"g{i}{v}", e) for v, e in _BRANCH]
        edges += [(f"g{i}{u}", f"g{i}{w}") for u, w in _BRANCH_EDGES]
    verts.append(("v0", -b))
    edges += [(f"g{i}m", "v0") for i in range(1, branches + 1)]
    return build_graph(verts, edges)


def ex56_graph(b=30):
    return star_graph(branches=2, b=b)


def single_vertex(e=-2):
    return build_graph([("v", e)], [])


def chain_graph(decorations):
    verts = [(f"v{i}", e) for i, e in enumerate(decorations)]
    edges = [(f"v{i}", f"v{i+1}") for i in range(len(decorations) - 1)]
    return build_graph(verts, edges)


def d4_graph(center=-2, leaf=-2):
    verts = [("c", center)] + [(f"l{i}", leaf) for i in range(3)]
    edges = [("c", f"l{i}") for i in range(3)]
    return build_graph(verts, edges)


REGISTRY = {
    "ex56": (ex56_graph, "two non-rational branches joined by a -b vertex (b=30 default)"),
    "star": (star_graph, "k copies of the ex56 branch around a -b vertex"),
    "single": (single_vertex, "one vertex, decoration e (-2 default)"),
    "d4": (d4_graph, "D4 star: central -2 with three -2 leaves"),
}


def builtin_graph(name, **params):
    if name not in REGISTRY:
        raise KeyError(f"unknown builtin example {name!r}; have {sorted(REGISTRY)}")
    fn, _ = REGISTRY[name]
    return fn(**params)
