"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`ConormalLabError`; the CLI maps these to exit code 3 (numerical),
except :class:`ConfigInvalid` and :class:`UnknownSuite` which exit with 2.
"""


class ConormalLabError(Exception):
    """Base class for all library errors."""


class InvalidPhasePoint(ConormalLabError, ValueError):
    pass


class GroupReductionFailed(ConormalLabError, RuntimeError):
    pass


class CutLocus(ConormalLabError, ValueError):
    """Parallel transport between the two base points is ambiguous."""


class DegenerateImmersion(ConormalLabError, ValueError):
    pass


class NotConormal(ConormalLabError, ValueError):
    pass


class EmptyPartition(ConormalLabError, ValueError):
    pass


class NotAnosov(ConormalLabError, ValueError):
    pass


class DegenerateTangent(ConormalLabError, ValueError):
    pass


class ModelMismatch(ConormalLabError, ValueError):
    pass


class QuadratureNotConverged(ConormalLabError, RuntimeError):
    pass


class NotHypersurface(ConormalLabError, ValueError):
    pass


class AllValuesZero(ConormalLabError, ValueError):
    """Every value in a sweep vanished; the family decays faster than any power."""


class GridTooCoarse(ConormalLabError, ValueError):
    pass


class SingularOnly(ConormalLabError, ValueError):
    pass


class ScaleLadderTooShort(ConormalLabError, ValueError):
    pass


class ConfigInvalid(ConormalLabError, ValueError):
    pass


class UnknownSuite(ConormalLabError, KeyError):
    pass
