"""Exception types raised by the toolkit."""


class CavitySRError(Exception):
    """Base class for all toolkit errors."""


class NegativeRateError(CavitySRError, ValueError):
    """A rate or coupling that must be nonnegative was negative."""


class ZeroEmittersError(CavitySRError, ValueError):
    """Emitter count below one."""


class MixedDephasingModelsError(CavitySRError, ValueError):
    """Both huang_rhys > 0 and gamma_phi > 0; the two dephasing models are
    studied separately and may not be combined."""


class ThetaOutOfRangeError(CavitySRError, ValueError):
    """Tilt angle outside [0, pi]."""


class NonpositiveFrequencyError(CavitySRError, ValueError):
    """Vibrational frequency must be positive."""


class NonpositiveTemperatureError(CavitySRError, ValueError):
    """Temperature must be nonnegative (T = 0 is the zero-occupation limit)."""


class InvalidPatternError(CavitySRError, ValueError):
    """Pattern components do not form a valid partition of N."""


class NuOutOfRangeError(CavitySRError, ValueError):
    """Excitation-block index outside 0..N (or N for gain blocks)."""


class EmptySourceBinError(CavitySRError, ValueError):
    """Single-site transition applied to a pattern with no emitter of the
    source type."""


class HTCNotSupportedError(CavitySRError, ValueError):
    """Operation only defined for the plain Tavis-Cummings model (S = 0)."""


class ToleranceNotMetError(CavitySRError, RuntimeError):
    """Adaptive integrator failed to meet the requested tolerances."""


class NonfiniteStateError(CavitySRError, RuntimeError):
    """Integration produced NaN or Inf."""


class DimensionCapError(CavitySRError, ValueError):
    """Requested dense Hilbert space exceeds the configured size cap."""


class DegenerateWindowError(CavitySRError, ValueError):
    """Fit window contains fewer than four samples."""


class EmptyTrajectoryError(CavitySRError, ValueError):
    """Trajectory has no samples."""


class ConfigError(CavitySRError, ValueError):
    """Malformed run configuration file."""


class PositivityWarning(RuntimeWarning):
    """Density matrix developed a negative eigenvalue beyond tolerance."""
