"""Exception types shared across the package."""


class CompliantArmError(Exception):
    """Base class for all package errors."""


class ConfigError(CompliantArmError):
    """Bad model/scenario configuration (maps to CLI exit code 2)."""

    def __init__(self, message, source=None, line=None):
        self.source = source
        self.line = line
        if source is not None and line is not None:
            message = f"{source}:{line}: {message}"
        elif source is not None:
            message = f"{source}: {message}"
        super().__init__(message)


class SingularityError(CompliantArmError):
    """Pseudoinverse requested at a (near-)singular Jacobian with zero damping."""

    def __init__(self, sigma_min):
        self.sigma_min = float(sigma_min)
        super().__init__(
            f"Jacobian is numerically singular (smallest singular value {self.sigma_min:.3e}); "
            "use nonzero damping"
        )


class DivergenceError(CompliantArmError):
    """Simulation state became non-finite (maps to CLI exit code 3)."""

    def __init__(self, t, tick, detail=""):
        self.t = float(t)
        self.tick = int(tick)
        msg = f"simulation diverged at t={t:.4f}s (tick {tick})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class AuditError(CompliantArmError):
    """Trajectory log unusable for a passivity audit (gaps, missing columns)."""


class UndefinedMetricError(CompliantArmError):
    """Metric denominator degenerate (e.g. zero desired range with no override)."""
