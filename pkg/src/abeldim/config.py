"""Resource caps for exhaustive enumerations.

ABELDIM_MAX_ENUM overrides the box-volume cap used by every brute-force
enumeration (oracles, structure cycles, twisted dimensions).
"""

import os

DEFAULT_ENUM_CAP = 10 ** 6     # max lattice points a brute enumeration may visit
SUPPORT_VERTEX_CAP = 20        # 2^|V| support loops refuse above this many vertices
GRID_POINT_CAP = 100_000       # pattern-engine grid size hard cap
BFS_NODE_CAP = 50_000          # minimizer-set BFS exploration cap


def enum_cap():
    v = os.environ.get("ABELDIM_MAX_ENUM")
    if v:
        return int(v)
    return DEFAULT_ENUM_CAP
