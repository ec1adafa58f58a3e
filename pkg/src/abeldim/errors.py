"""Exception types raised by the library.

Input-validation failures and resource-cap failures are distinct from
mathematical-consistency failures (InconsistentOracle), which indicate either
a bug or a bad user-supplied oracle and should never pass silently.
"""


class AbeldimError(Exception):
    pass


# -- graph validation -------------------------------------------------------

class NotATree(AbeldimError):
    pass


class NotNegativeDefinite(AbeldimError):
    pass


class DuplicateEdge(AbeldimError):
    pass


class VertexMismatch(AbeldimError):
    pass


class NotInLipmanCone(AbeldimError):
    pass


# -- optimization -----------------------------------------------------------

class EmptyBox(AbeldimError):
    pass


class BoxTooLarge(AbeldimError):
    pass


class NoConvergence(AbeldimError):
    pass


# -- enumeration caps -------------------------------------------------------

class SupportEnumerationTooLarge(AbeldimError):
    pass


class GridTooLarge(AbeldimError):
    pass


class DisconnectedSupport(AbeldimError):
    pass


# -- oracles ----------------------------------------------------------------

class InconsistentOracle(AbeldimError):
    pass


class OracleDomainViolation(AbeldimError):
    pass


class NonIntegralShift(AbeldimError):
    pass


class SOutOfRange(AbeldimError):
    pass
