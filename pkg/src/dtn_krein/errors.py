"""Exception hierarchy for dtn_krein."""


class DtnKreinError(Exception):
    """Base class for all library errors."""


class NearSingularShift(DtnKreinError):
    """The shifted operator is too close to singular to accept the shift.

    Parameters
    ----------
    shift : complex
        The rejected spectral parameter.
    sigma_min : float
        Smallest singular value of the shifted operator.
    tau : float
        Acceptance threshold that was not exceeded.
    which : str
        Name of the operator whose resolvent was requested.
    """

    def __init__(self, shift, sigma_min, tau, which="H"):
        self.shift = complex(shift)
        self.sigma_min = float(sigma_min)
        self.tau = float(tau)
        self.which = which
        super().__init__(
            f"shift {self.shift} rejected for {which}: "
            f"sigma_min={self.sigma_min:.3e} <= tau={self.tau:.3e}"
        )


class NotHermitian(DtnKreinError, ValueError):
    pass


class SingularBoundaryBlock(DtnKreinError):
    """H_BB cannot be inverted, so interface/boundary unknowns cannot be eliminated."""


class SingularQ(DtnKreinError):
    """Q(lambda) is not invertible (lambda near the spectrum of the Neumann-type operator)."""

    def __init__(self, shift, sigma_min, tau):
        self.shift = complex(shift)
        self.sigma_min = float(sigma_min)
        self.tau = float(tau)
        super().__init__(
            f"Q({self.shift}) is singular: sigma_min={self.sigma_min:.3e} <= tau={self.tau:.3e}"
        )


class FluxMismatch(DtnKreinError):
    pass


class NotElliptic(DtnKreinError):
    def __init__(self, cell, value):
        self.cell = tuple(int(c) for c in cell)
        self.value = float(value)
        super().__init__(
            f"coefficient tensor not positive definite at cell {self.cell}: "
            f"smallest eigenvalue {self.value:.6g}"
        )


class LayoutError(DtnKreinError, ValueError):
    """Inconsistent index partition or block structure."""


class NoExteriorPartition(DtnKreinError):
    pass


class ConfigError(DtnKreinError):
    pass
