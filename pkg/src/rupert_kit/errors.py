"""Exception types raised by rupert_kit."""


class RupertError(Exception):
    """Base class for all library errors."""


class DegenerateInput(RupertError):
    pass


class InfeasibleInput(RupertError):
    pass


class InvalidOrientation(RupertError):
    pass


class InvalidDirection(RupertError):
    pass


class AmbiguousClassification(RupertError):
    """Projection direction is too close to face-parallel to classify the shadow."""


class NotHexagon(RupertError):
    pass


class VertexNotCornerCandidate(RupertError):
    pass


class FaceParallelDirection(RupertError):
    pass


class ConstructionFailed(RupertError):
    """Internal assertion: a construction that should always succeed did not."""


class CannotHarden(RupertError):
    """No small shift/rotation gives the requested clearance; the placement is at its supremum."""


class DoesNotFit(RupertError):
    pass


class SteepPlane(RupertError):
    pass


class NotACrossSection(RupertError):
    pass


class LiftDegenerate(RupertError):
    pass
