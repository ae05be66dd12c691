"""Exception hierarchy. Everything derives from ``SymmetroError``."""


class SymmetroError(Exception):
    pass


class HermitianityError(SymmetroError, ValueError):
    pass


class DensityError(SymmetroError, ValueError):
    pass


class NullSpaceError(SymmetroError, ArithmeticError):
    """The operator equation has no solution on the kernel of the left operand."""


class DomainError(SymmetroError, ValueError):
    pass


class IntegrationError(SymmetroError, ArithmeticError):
    pass


class EstimatorRangeError(SymmetroError, ValueError):
    """A spectral value lies outside the range of the f-map."""


class PomError(SymmetroError, ValueError):
    pass


class ZeroProbabilityError(SymmetroError, ArithmeticError):
    pass


class ImpossibleOutcomeError(SymmetroError, ArithmeticError):
    pass


class ConfigError(SymmetroError, ValueError):
    pass
