"""Exception types shared across the package."""


class SemistabError(Exception):
    """Base class for package-specific failures."""


class DimensionMismatch(SemistabError, ValueError):
    """Operands defined over different mode counts."""


class SpectrumHit(SemistabError, ValueError):
    """Resolvent requested at (or numerically indistinguishable from) an
    eigenvalue.  Carries the offending mode index and eigenvalue."""

    def __init__(self, point, index, eigenvalue):
        self.point = point
        self.index = index
        self.eigenvalue = eigenvalue
        super().__init__(
            f"resolvent point {point} is within relative tolerance of "
            f"eigenvalue {eigenvalue} (mode {index})"
        )


class NotSectorial(SemistabError, ValueError):
    """Fractional powers / decay norms need every eigenvalue strictly in the
    open left half-plane."""


class ConvergenceFailure(SemistabError, RuntimeError):
    """An iterative solve (Picard correction) failed to contract even after
    the maximum number of internal step halvings."""


class UsageError(SemistabError, ValueError):
    """Bad configuration or command-line usage; maps to exit status 2."""
