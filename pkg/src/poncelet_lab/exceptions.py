"""Exception hierarchy for poncelet_lab."""


class PonceletError(Exception):
    """Base class for all library errors."""


class GeometryError(PonceletError, ValueError):
    pass


class SingularMap(GeometryError):
    pass


class DegenerateConic(GeometryError):
    pass


class PointInside(GeometryError):
    pass


class OffDisk(GeometryError):
    pass


class DegenerateCaustic(GeometryError):
    pass


class InfeasibleParams(GeometryError):
    pass


class TangentFailure(GeometryError):
    pass


class DegenerateTriangle(GeometryError):
    pass


class ZeroMass(GeometryError):
    pass


class RightTriangle(GeometryError):
    """A derived object is unbounded because a vertex angle is right."""


class TangentialUndefined(RightTriangle):
    pass


class DegenerateLocus(GeometryError):
    """The locus collapses to a segment.

    ``center``, ``half_length`` and ``theta`` describe the segment.
    """

    def __init__(self, msg, center=None, half_length=None, theta=None):
        super().__init__(msg)
        self.center = center
        self.half_length = half_length
        self.theta = theta


class RankDeficient(GeometryError):
    pass


class UnsupportedCombo(PonceletError, KeyError):
    pass


class UnsupportedFamily(PonceletError, ValueError):
    pass


class NoMinimum(PonceletError, RuntimeError):
    pass


class InvalidConfig(PonceletError, ValueError):
    pass


class InadmissiblePair(PonceletError, ValueError):
    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class IoFailure(PonceletError, OSError):
    pass
