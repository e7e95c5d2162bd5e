"""Exception types raised across the package."""


class ModelError(ValueError):
    """Malformed model: inconsistent dimensions or invalid parameters."""


class AssumptionError(ModelError):
    """The model violates a standing hypothesis (e.g. non-positive self-inhibition)."""


class KernelDivergenceError(ValueError):
    """Exponential kernel moment requested at or beyond the smallest decay rate."""


class DomainError(ValueError):
    """Rate parameter outside the domain where the comparison matrix is defined."""


class InfeasibleError(RuntimeError):
    """No certificate exists at the requested rate (or at rate zero)."""


class SpectralConvergenceError(RuntimeError):
    """Power iteration hit its iteration cap before the Perron bracket closed."""


class BlowUpError(RuntimeError):
    """Integration produced a non-finite or huge state.

    Attributes
    ----------
    time : float
        Time of the step at which the abort happened.
    trajectory : Trajectory or None
        Samples recorded before the abort.
    """

    def __init__(self, message, time, trajectory=None):
        super().__init__(message)
        self.time = time
        self.trajectory = trajectory


class InsufficientDataError(ValueError):
    """Fewer than five usable points above the noise floor."""
