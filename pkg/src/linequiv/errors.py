"""Shared exception types."""


class GuardError(ValueError):
    """An operation was refused because the requested arity exceeds its
    exhaustive-computation guard.  The message includes a cost estimate."""


class SimplexIterationError(RuntimeError):
    """The simplex solver hit its iteration cap; carries diagnostics."""

    def __init__(self, message, *, phase, iterations, objective):
        super().__init__(
            f"{message} (phase={phase}, iterations={iterations}, objective={objective})"
        )
        self.phase = phase
        self.iterations = iterations
        self.objective = objective


class SamplingError(RuntimeError):
    """Every resampling attempt missed the target distance."""

    def __init__(self, attempts, best_distance):
        super().__init__(
            f"no sample of the sign representation reached the target distance "
            f"after {attempts} attempts; best achieved distance = {best_distance} "
            f"(the sampler constant is too small for this instance)"
        )
        self.attempts = attempts
        self.best_distance = best_distance


class ProtocolError(RuntimeError):
    """Malformed bit stream or broken transport during a protocol run."""
