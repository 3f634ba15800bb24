"""Physical parameters, initial conditions and single-emitter states.

Conventions fixed here and used everywhere else:

* Energies/rates in eV, hbar = 1 (see :mod:`cavitysr.units`).
* ``delta`` is the cavity detuning  omega_c - omega_0.
* All solvers work in the frame rotating at the emitter splitting omega_0,
  where the emitter phase vanishes and the cavity frequency equals ``delta``.
  Every observable computed by this package (photon number, |<sigma^+>|,
  <sigma^z>, <J^2>) is invariant under that transformation.
* The tilted initial emitter state is generated by exp(-i theta sigma^x / 2)
  acting on the excited state, which gives <sigma^+>(0) = -i sin(theta)/2.
  Only the magnitude of the coherence enters any observable; the sign
  convention is fixed once here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    MixedDephasingModelsError,
    NegativeRateError,
    NonpositiveFrequencyError,
    NonpositiveTemperatureError,
    ThetaOutOfRangeError,
    ZeroEmittersError,
)

_RATE_FIELDS = ("kappa", "gamma", "gamma_phi", "gamma_nu", "huang_rhys",
                "temperature", "omega_nu")


@dataclass(frozen=True)
class ModelParams:
    """All physical rates and frequencies of the (H)TC model, in eV.

    ``g_collective`` is the collective coupling g*sqrt(N); the
    single-emitter coupling g is derived.  ``huang_rhys`` (S) and
    ``gamma_phi`` are mutually exclusive ways of modelling vibrational
    dephasing and may not both be nonzero.
    """

    n_emitters: int
    g_collective: float
    delta: float = 0.0
    omega0: float = 0.0
    kappa: float = 0.0
    gamma: float = 0.0
    gamma_phi: float = 0.0
    omega_nu: float = 0.0
    huang_rhys: float = 0.0
    gamma_nu: float = 0.0
    temperature: float = 0.0

    @property
    def g(self):
        """Single-emitter coupling g = g_collective / sqrt(N)."""
        return self.g_collective / math.sqrt(self.n_emitters)

    @property
    def is_htc(self):
        """True when an explicit vibrational mode is coupled (S > 0)."""
        return self.huang_rhys > 0.0

    def rotating(self):
        """Return the same parameters in the frame rotating at omega0.

        The emitter splitting is removed and the cavity frequency becomes
        the detuning; vibrational terms are unchanged.
        """
        return replace(self, omega0=0.0)


def to_rotating_frame(params: ModelParams) -> ModelParams:
    """Functional spelling of :meth:`ModelParams.rotating`."""
    return params.rotating()


def validate(params: ModelParams) -> ModelParams:
    """Check all ModelParams invariants, returning the validated record.

    Raises NegativeRateError, ZeroEmittersError or
    MixedDephasingModelsError on violation.
    """
    if int(params.n_emitters) != params.n_emitters or params.n_emitters < 1:
        raise ZeroEmittersError(
            f"n_emitters must be a positive integer, got {params.n_emitters}")
    for name in _RATE_FIELDS:
        value = getattr(params, name)
        if value < 0.0 or not math.isfinite(value):
            raise NegativeRateError(f"{name} must be finite and >= 0, got {value}")
    # g = 0 is accepted so decoupled reference runs (pure thermalization,
    # free decay) remain expressible.
    if params.g_collective < 0.0 or not math.isfinite(params.g_collective):
        raise NegativeRateError(
            f"g_collective must be finite and >= 0, got {params.g_collective}")
    if not math.isfinite(params.delta) or not math.isfinite(params.omega0):
        raise NegativeRateError("delta and omega0 must be finite")
    if params.huang_rhys > 0.0 and params.gamma_phi > 0.0:
        raise MixedDephasingModelsError(
            "huang_rhys and gamma_phi cannot both be nonzero: vibrational "
            "coupling and Markovian pure dephasing are alternative models")
    if params.huang_rhys > 0.0 and params.omega_nu <= 0.0:
        raise NonpositiveFrequencyError(
            "omega_nu must be positive when huang_rhys > 0")
    return params


@dataclass(frozen=True)
class InitialCondition:
    """Tilt angle of the emitter ensemble and the vibrational start state.

    theta = 0 is the fully inverted incoherent ensemble (superfluorescence);
    theta != 0 adds a coherent tilt with |<sigma^+>|(0) = sin(theta)/2
    (superradiance).  The cavity always starts in vacuum.  When
    ``vib_thermal`` is true, vibrational modes start thermal at
    ``ModelParams.temperature``, otherwise in their ground state.
    """

    theta: float = 0.0
    vib_thermal: bool = True

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise ThetaOutOfRangeError(
                f"theta must lie in [0, pi], got {self.theta}")


def single_emitter_density(theta: float) -> np.ndarray:
    """Density matrix of one emitter tilted by ``theta`` about the x axis.

    Basis order (up, down).  rho[0, 0] = cos^2(theta/2),
    rho[0, 1] = i sin(theta)/2, so <sigma^+> = rho[1, 0] = -i sin(theta)/2.
    """
    if not (0.0 <= theta <= math.pi):
        raise ThetaOutOfRangeError(f"theta must lie in [0, pi], got {theta}")
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return np.array([[c * c, 1j * s * c],
                     [-1j * s * c, s * s]], dtype=complex)


def bose_occupation(omega_nu: float, temperature: float) -> float:
    """Bose-Einstein occupation n_B = 1/(exp(omega/T) - 1); k_B = 1.

    T = 0 is accepted as the limit n_B = 0.
    """
    if omega_nu <= 0.0:
        raise NonpositiveFrequencyError(f"omega_nu must be > 0, got {omega_nu}")
    if temperature < 0.0:
        raise NonpositiveTemperatureError(
            f"temperature must be >= 0, got {temperature}")
    if temperature == 0.0:
        return 0.0
    return 1.0 / math.expm1(omega_nu / temperature)


def thermal_rates(params: ModelParams):
    """Vibrational thermalization pair (gamma_up, gamma_down).

    gamma_up = gamma_nu * n_B and gamma_down = gamma_nu * (n_B + 1), so
    gamma_down - gamma_up = gamma_nu exactly, independent of temperature.
    """
    if params.gamma_nu == 0.0:
        return 0.0, 0.0
    n_b = bose_occupation(params.omega_nu, params.temperature)
    return params.gamma_nu * n_b, params.gamma_nu * (n_b + 1.0)
