"""Mean-field and symmetry-broken second-order cumulant dynamics.

Working variables are scaled so the collective coupling G = g sqrt(N) is
the only place the emitter number enters the equations of motion;
``alpha = <a>/sqrt(N)`` and mixed photon moments are scaled likewise.
Mean-field dynamics is then independent of N at fixed G, and N reappears
only in observables.

The equations are derived by hand from the adjoint master equation with
same-site Pauli products reduced before closure
(sigma^+ sigma^- = (1 + sigma^z)/2, sigma^- sigma^+ = (1 - sigma^z)/2,
sigma^- sigma^z = sigma^-, sigma^z sigma^- = -sigma^-), and third-order
cumulants closed as
<xyz> -> <xy><z> + <xz><y> + <yz><x> - 2<x><y><z>.
They are validated against the dense reference solver in the tests, which
is the authority if any term were in doubt.

Mean field supports the full HTC model (vibrational displacement beta with
momentum-damped thermalization); the second-order cumulant set is
implemented for the plain TC model only.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (HTCNotSupportedError, NonfiniteStateError,
                     ToleranceNotMetError)
from .params import InitialCondition, ModelParams, single_emitter_density, validate
from .trajectory import Trajectory
from .units import fs_to_internal

# mean-field layout: scaled <a>, <sigma^->, <sigma^z>, <b>
IA, IS, IZ, IB = range(4)

# cumulant layout: first moments then scaled second moments
# NC = <a^dag a>/N, AA = <a a>/N, XM = <a sigma^->/sqrt(N),
# XP = <a sigma^+>/sqrt(N), XZ = <a sigma^z>/sqrt(N); cross-emitter
# moments PM = <sigma^+_1 sigma^-_2>, MM = <sigma^-_1 sigma^-_2>,
# ZM = <sigma^z_1 sigma^-_2>, ZZ = <sigma^z_1 sigma^z_2> are unscaled.
(CA, CS, CZ, CNC, CAA, CXM, CXP, CXZ, CPM, CMM, CZM, CZZ) = range(12)


def mf_rhs(y: np.ndarray, params: ModelParams) -> np.ndarray:
    """Mean-field equations of motion (rotating frame, scaled variables)."""
    p = params
    big_g = p.g_collective
    a, s, z, beta = y[IA], y[IS], y[IZ], y[IB]
    gamma2 = 0.5 * p.gamma + 2.0 * p.gamma_phi
    vib = 2.0 * math.sqrt(p.huang_rhys) * p.omega_nu if p.huang_rhys > 0 else 0.0

    out = np.empty(4, dtype=complex)
    out[IA] = -(1j * p.delta + 0.5 * p.kappa) * a - 1j * big_g * s
    out[IS] = -gamma2 * s + 1j * big_g * a * z \
        - 1j * vib * (beta + np.conj(beta)) * s
    out[IZ] = 2j * big_g * (np.conj(a) * s - a * np.conj(s)) \
        - p.gamma * (z + 1.0)
    if p.huang_rhys > 0 or p.gamma_nu > 0:
        # momentum damping: the Lamb shift converts half the damping of
        # beta into a beta* feed, so only Im(beta) relaxes
        out[IB] = -(1j * p.omega_nu + 0.5 * p.gamma_nu) * beta \
            + 0.5 * p.gamma_nu * np.conj(beta) \
            - 1j * math.sqrt(p.huang_rhys) * p.omega_nu * z
    else:
        out[IB] = 0.0
    return out


def c2_rhs(y: np.ndarray, params: ModelParams) -> np.ndarray:
    """Symmetry-broken second-order cumulant equations for the TC model."""
    p = params
    if p.huang_rhys != 0.0:
        raise HTCNotSupportedError(
            "second-order cumulants are implemented for S = 0 only")
    big_g = p.g_collective
    n = p.n_emitters
    one = 1.0 - 1.0 / n
    a, s, z = y[CA], y[CS], y[CZ]
    nc, aa = y[CNC], y[CAA]
    xm, xp, xz = y[CXM], y[CXP], y[CXZ]
    pm, mm, zm, zz = y[CPM], y[CMM], y[CZM], y[CZZ]
    ac, sc, xpc, xzc, zmc = (np.conj(v) for v in (a, s, xp, xz, zm))
    gamma2 = 0.5 * p.gamma + 2.0 * p.gamma_phi
    lam_a = 1j * p.delta + 0.5 * p.kappa

    out = np.empty(12, dtype=complex)
    out[CA] = -lam_a * a - 1j * big_g * s
    out[CS] = -gamma2 * s + 1j * big_g * xz
    out[CZ] = 2j * big_g * (xpc - xp) - p.gamma * (z + 1.0)

    out[CNC] = 1j * big_g * (xp - xpc) - p.kappa * nc
    out[CAA] = -2.0 * lam_a * aa - 2j * big_g * xm
    out[CXM] = -(lam_a + gamma2) * xm - 1j * big_g * one * mm \
        + 1j * big_g * (aa * z + 2.0 * xz * a - 2.0 * a * a * z)
    out[CXP] = -(lam_a + gamma2) * xp \
        - 1j * big_g * ((1.0 - z) / (2.0 * n) + one * pm + z / n) \
        - 1j * big_g * (nc * z + xzc * a + xz * ac - 2.0 * a * ac * z)
    out[CXZ] = -(lam_a + p.gamma) * xz - p.gamma * a \
        - 1j * big_g * (s / n + one * zm) \
        + 2j * big_g * (nc * s + xpc * a + xm * ac - 2.0 * a * ac * s
                        + s / n
                        - (aa * sc + 2.0 * xp * a - 2.0 * a * a * sc))

    out[CPM] = -(p.gamma + 4.0 * p.gamma_phi) * pm \
        - 1j * big_g * (xzc * s + xpc * z + zm * ac - 2.0 * ac * z * s) \
        + 1j * big_g * (xp * z + xz * sc + zmc * a - 2.0 * a * sc * z)
    out[CMM] = -(p.gamma + 4.0 * p.gamma_phi) * mm \
        + 2j * big_g * (xz * s + xm * z + zm * a - 2.0 * a * z * s)
    out[CZM] = -(1.5 * p.gamma + 2.0 * p.gamma_phi) * zm - p.gamma * s \
        + 2j * big_g * ((mm * ac + 2.0 * xpc * s - 2.0 * ac * s * s)
                        - (pm * a + xp * s + xm * sc - 2.0 * a * s * sc)) \
        + 1j * big_g * (zz * a + 2.0 * xz * z - 2.0 * a * z * z)
    bloch = xpc * z + xzc * s + zm * ac - 2.0 * ac * s * z
    out[CZZ] = 4j * big_g * (bloch - np.conj(bloch)) \
        - 2.0 * p.gamma * (z + zz)
    return out


def initial_state(method: str, params: ModelParams, init: InitialCondition):
    """Product-state moments: cavity vacuum, emitters tilted by theta."""
    rho1 = single_emitter_density(init.theta)
    s0 = rho1[0, 1]          # <sigma^-> = Tr(E_du rho) = rho_ud
    z0 = (rho1[0, 0] - rho1[1, 1]).real
    if method == "mf":
        y = np.zeros(4, dtype=complex)
        y[IS] = s0
        y[IZ] = z0
        # beta(0) = 0 both for the thermal and the ground vibrational state
        return y
    y = np.zeros(12, dtype=complex)
    y[CS] = s0
    y[CZ] = z0
    y[CPM] = abs(s0) ** 2
    y[CMM] = s0 * s0
    y[CZM] = z0 * s0
    y[CZZ] = z0 * z0
    return y


def observables(method: str, y: np.ndarray, n_emitters: int):
    """(photon, coherence, sz, j2) from a state row (vectorized over time)."""
    n = n_emitters
    if method == "mf":
        a, s, z = y[IA], y[IS], y[IZ]
        photon = n * np.abs(a) ** 2
        j2 = (n * n / 4.0) * (z.real ** 2 + 4.0 * np.abs(s) ** 2)
    else:
        s, z = y[CS], y[CZ]
        photon = n * y[CNC].real
        j2 = 0.75 * n + n * (n - 1.0) * y[CPM].real \
            + 0.25 * n * (n - 1.0) * y[CZZ].real
    return photon, np.abs(s), y[CZ if method != "mf" else IZ].real, j2


def solve_semiclassical(method: str, params: ModelParams,
                        init: InitialCondition, t_grid_fs,
                        rtol=1e-9, atol=1e-12) -> Trajectory:
    """Integrate MF or C2 dynamics on a time grid given in fs."""
    method = method.lower()
    if method not in ("mf", "c2"):
        raise ValueError(f"method must be 'mf' or 'c2', got {method!r}")
    validate(params)
    p = params.rotating()
    if method == "c2" and p.huang_rhys != 0.0:
        raise HTCNotSupportedError(
            "second-order cumulants are implemented for S = 0 only")
    rhs = mf_rhs if method == "mf" else c2_rhs
    y0 = initial_state(method, p, init)
    t_grid_fs = np.asarray(t_grid_fs, dtype=float)
    t_int = fs_to_internal(t_grid_fs)
    if len(t_int) == 1:
        y = y0[:, None]
    else:
        sol = solve_ivp(lambda t, y: rhs(y, p), (t_int[0], t_int[-1]), y0,
                        t_eval=t_int, method="DOP853", rtol=rtol, atol=atol)
        if not sol.success:
            raise ToleranceNotMetError(sol.message)
        if not np.all(np.isfinite(sol.y)):
            raise NonfiniteStateError("semiclassical state became non-finite")
        y = sol.y
    photon, coh, sz, j2 = observables(method, y, p.n_emitters)
    traj = Trajectory(times_fs=t_grid_fs, photon=photon, sz=sz,
                      n_emitters=p.n_emitters, coherence=coh, j2=j2)
    if method == "mf":
        traj.extras["vib_displacement"] = y[IB]
    return traj
