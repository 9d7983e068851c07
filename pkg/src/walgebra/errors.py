"""Exception types shared across the workbench."""


class WAlgebraError(Exception):
    """Base class for all workbench-specific errors."""


class SuperEqualParts(WAlgebraError):
    """sl(N1|N2) with N1 == N2 is not simple; the construction is refused."""


class NormalizationImpossible(WAlgebraError):
    """The invariant form cannot be scaled to (e|f)=1 because str(ef)=0."""


class SingularPairing(WAlgebraError):
    """The generator/dual-generator pairing matrix failed to invert."""


class MissingTableEntry(WAlgebraError):
    """A bracket extension needed a generator pair absent from the table."""


class NoSolution(WAlgebraError):
    """The generator-solving linear system is inconsistent."""


class ScheduleInapplicable(WAlgebraError):
    """No scripted derivation schedule exists for the requested shape."""


class UnknownGenerator(WAlgebraError):
    """A generator index named on the command line does not exist."""
