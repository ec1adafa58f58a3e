"""Shared random-instance generators.

Plain random decorations in [-5,-1] on small trees are almost always
rational (h1 = 0 everywhere), which would make the agreement suites vacuous;
half the corpus is therefore seeded with a (-1)-center star with heavy legs,
the smallest shape that reaches min chi <= 0 within the decoration range.
"""

import random

import pytest

from abeldim import Cycle, EStarCombination, NotNegativeDefinite
from abeldim.lattice import build_graph, canonical_cycle


def random_tree(rng, nmax=5, seed_star=False):
    while True:
        if seed_star:
            verts = [("v0", -1)] + [(f"v{i}", rng.randint(-5, -4)) for i in (1, 2, 3)]
            edges = [("v0", f"v{i}") for i in (1, 2, 3)]
            for i in range(4, rng.randint(4, max(4, nmax))):
                verts.append((f"v{i}", rng.randint(-5, -1)))
                edges.append((f"v{i}", f"v{rng.randint(0, i - 1)}"))
        else:
            n = rng.randint(1, nmax)
            verts = [(f"v{i}", rng.randint(-5, -1)) for i in range(n)]
            edges = [(f"v{i}", f"v{rng.randint(0, i - 1)}") for i in range(1, n)]
        try:
            return build_graph(verts, edges)
        except NotNegativeDefinite:
            continue


def random_Z(rng, G):
    # coefficients in [1, ceil(Z_K)+2], capped at 12 to keep brute sweeps exact
    zk = canonical_cycle(G).ceil()
    return Cycle({v: rng.randint(1, min(12, max(1, zk[v]) + 2)) for v in G.vertices})


def random_lprime(rng, G, max_total=3, min_total=0):
    a = {}
    for _ in range(rng.randint(min_total, max_total)):
        v = rng.choice(G.vertices)
        a[v] = a.get(v, 0) + 1
    return EStarCombination(a)


def random_instance(rng, i, nmax=5):
    G = random_tree(rng, nmax=nmax, seed_star=(i % 2 == 0))
    return G, random_Z(rng, G), random_lprime(rng, G)


@pytest.fixture
def rng():
    return random.Random(20240817)
