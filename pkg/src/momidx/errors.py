"""Exception and warning types shared across the package."""


class MomidxError(Exception):
    pass


class NegativeDensity(MomidxError, ValueError):
    pass


class UnsupportedTransform(MomidxError, ValueError):
    pass


class IndexOutOfRange(MomidxError, IndexError):
    pass


class NotPositiveDefinite(MomidxError, ArithmeticError):
    """Cholesky pivot fell below tolerance; ``failing_order`` is the section order."""

    def __init__(self, failing_order, pivot=None):
        self.failing_order = failing_order
        self.pivot = pivot
        msg = f"matrix is not positive definite at order {failing_order}"
        if pivot is not None:
            msg += f" (pivot {pivot:.3e})"
        super().__init__(msg)


class NoConvergence(MomidxError, ArithmeticError):
    pass


class KernelOverflow(MomidxError, OverflowError):
    pass


class SingularSystem(MomidxError, ArithmeticError):
    pass


class TooShort(MomidxError, ValueError):
    pass


class NotOnCircle(MomidxError, ValueError):
    pass


class NotApplicable(MomidxError, ValueError):
    pass


class ConfigError(MomidxError, ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class NonConvergedQuadrature(UserWarning):
    """Issued when node doubling hits ``max_nodes`` before meeting ``rel_tol``."""


class ConditioningWarning(UserWarning):
    pass
