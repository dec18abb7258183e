"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`CStarFramesError` so callers (and the CLI) can separate it from
programming errors.
"""


class CStarFramesError(Exception):
    """Base class for all package errors."""


class DescriptorMismatch(CStarFramesError):
    """Operands live over different algebras."""


class DimensionMismatch(CStarFramesError):
    """Module ranks or operator shapes do not conform."""


class SpaceMismatch(CStarFramesError):
    """Objects are defined over different measure spaces."""


class SingularElement(CStarFramesError):
    """An algebra element has a (numerically) singular block."""


class SingularOperator(CStarFramesError):
    """An operator cannot be inverted at the requested tolerance."""


class NotAFrame(CStarFramesError):
    """The lower order bound of a family is not positive."""


class TooManyAtoms(CStarFramesError):
    """Subset enumeration is infeasible and no subsets were supplied."""


class HypothesisViolated(CStarFramesError):
    """A theorem's hypothesis does not hold for the given data.

    ``condition`` names the failing requirement.
    """

    def __init__(self, condition, detail=None):
        msg = condition if detail is None else f"{condition}: {detail}"
        super().__init__(msg)
        self.condition = condition
        self.detail = detail


class SmallnessViolated(HypothesisViolated):
    """The smallness condition on perturbation constants fails."""


class ConclusionFailed(CStarFramesError):
    """Hypotheses held but the conclusion did not.

    For proven statements this points at a tolerance problem or a bug; the
    offending report is attached.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotInvertible(ConclusionFailed):
    """An operator that must be invertible turned out singular."""


class UnsatisfiableRequest(CStarFramesError):
    """A generator exhausted its retry budget."""


class HypothesisUnreachable(CStarFramesError):
    """A perturbation generator cannot meet the targeted hypothesis."""


class UnknownTheorem(CStarFramesError):
    """The theorem id is not in the registry."""
