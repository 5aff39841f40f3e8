"""Exception hierarchy. CLI exit codes are attached to the classes."""


class HDSliceError(Exception):
    exit_code = 1


class ParseError(HDSliceError, ValueError):
    exit_code = 2


class ShapeMismatch(HDSliceError, ValueError):
    exit_code = 2


class NotSquare(ShapeMismatch):
    pass


class NonGenericData(HDSliceError, ValueError):
    exit_code = 3


class DegenerateSpectrum(NonGenericData):
    pass


class DegenerateY(NonGenericData):
    pass


class OnDiscriminant(NonGenericData):
    pass


class DegenerateAtEndpoint(NonGenericData):
    pass


class RankTooSmall(HDSliceError, ValueError):
    exit_code = 3


class SolverFailure(HDSliceError, RuntimeError):
    exit_code = 4


class ConvergenceFailure(SolverFailure):
    pass


class IllConditioned(SolverFailure):
    pass


class DegreeOverflow(SolverFailure):
    pass


class WrongDegree(HDSliceError, ValueError):
    exit_code = 2


class VerificationFailure(HDSliceError, AssertionError):
    exit_code = 5
