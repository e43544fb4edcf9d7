"""Exception hierarchy shared by every module."""


class JfrftError(Exception):
    """Base class for all package errors."""


class ConfigError(JfrftError):
    """Bad user input or configuration (CLI exit code 1)."""


class ShapeMismatch(ConfigError, ValueError):
    pass


class ParseError(ConfigError):
    pass


class NumericalError(JfrftError):
    """Numerical failure (CLI exit code 2)."""


class NonConvergence(NumericalError):
    pass


class NearDefective(NumericalError):
    pass


class Singular(NumericalError):
    pass


class SingularNormalMatrix(Singular):
    pass


class DimensionOverflow(NumericalError):
    pass


class DuplicatePoints(ConfigError):
    pass


class IsolatedVertex(NumericalError):
    pass


class BranchCutEigenvalue(NumericalError):
    pass


class ZeroEigenvalue(NumericalError):
    pass


class CommutingMatrixDegenerate(NumericalError):
    pass


class ZeroReference(NumericalError):
    pass


class EmptyReport(NumericalError):
    pass
