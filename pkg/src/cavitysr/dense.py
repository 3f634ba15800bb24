"""Brute-force reference solver on the explicit Hilbert space.

Builds the full Liouvillian of the dissipative TC or HTC master equation
for small emitter numbers and integrates it at tight tolerance.  This is
the ground-truth oracle every other solver is tested against; it values
transparency over speed and refuses Hilbert spaces above a configurable
cap.

Tensor layout: photon (x) emitter_1 ... emitter_N [(x) vib_1 ... vib_N].
Density matrices are vectorized row-major, so a superoperator term
A rho B becomes (A kron B^T) vec(rho).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ._integrate import observed_solve
from .errors import DimensionCapError, PositivityWarning
from .params import (InitialCondition, ModelParams, single_emitter_density,
                     thermal_rates, validate)
from .trajectory import Trajectory
from .units import fs_to_internal

_SIGMA_M = np.array([[0.0, 0.0], [1.0, 0.0]])   # |down><up|, basis (up, down)
_SIGMA_P = _SIGMA_M.T
_SIGMA_Z = np.diag([1.0, -1.0])


@dataclass(frozen=True)
class DenseConfig:
    """Hilbert-space truncation for the dense solver.

    ``n_photon_levels = None`` means N + 1 Fock states, which is exact for
    the TC model without gain.  ``n_vib_levels`` only matters for the HTC
    model.  The product dimension must stay below ``dim_cap``.
    """

    model: str = "tc"                  # "tc" | "htc"
    n_photon_levels: int | None = None
    n_vib_levels: int = 5
    dim_cap: int = 20_000

    def __post_init__(self):
        if self.model not in ("tc", "htc"):
            raise ValueError(f"model must be 'tc' or 'htc', got {self.model!r}")
        if self.n_vib_levels < 1:
            raise ValueError("n_vib_levels must be >= 1")


def hilbert_dim(params: ModelParams, cfg: DenseConfig) -> int:
    n = params.n_emitters
    n_ph = cfg.n_photon_levels if cfg.n_photon_levels is not None else n + 1
    dim = n_ph * 2 ** n
    if cfg.model == "htc":
        dim *= cfg.n_vib_levels ** n
    return dim


def _check_cap(params, cfg):
    dim = hilbert_dim(params, cfg)
    if dim > cfg.dim_cap:
        raise DimensionCapError(
            f"dense Hilbert dimension {dim} exceeds cap {cfg.dim_cap}")
    return dim


def _factors(params, cfg):
    """Local dimensions of each tensor factor, in layout order."""
    n = params.n_emitters
    n_ph = cfg.n_photon_levels if cfg.n_photon_levels is not None else n + 1
    dims = [n_ph] + [2] * n
    if cfg.model == "htc":
        dims += [cfg.n_vib_levels] * n
    return dims


def _embed(local_op, slot, dims):
    """Lift a local operator on tensor factor ``slot`` to the full space."""
    op = sp.identity(1, format="csr", dtype=complex)
    for i, d in enumerate(dims):
        factor = sp.csr_matrix(local_op, dtype=complex) if i == slot \
            else sp.identity(d, format="csr", dtype=complex)
        op = sp.kron(op, factor, format="csr")
    return op


class DenseOperators:
    """All operators of the (H)TC model on the explicit space."""

    def __init__(self, params: ModelParams, cfg: DenseConfig):
        validate(params)
        _check_cap(params, cfg)
        self.params = params
        self.cfg = cfg
        dims = _factors(params, cfg)
        self.dims = dims
        self.dim = int(np.prod(dims))
        n = params.n_emitters
        n_ph = dims[0]

        ladder = sp.diags(np.sqrt(np.arange(1, n_ph)), 1, format="csr")
        self.a = _embed(ladder, 0, dims)
        self.sm = [_embed(_SIGMA_M, 1 + i, dims) for i in range(n)]
        self.sz = [_embed(_SIGMA_Z, 1 + i, dims) for i in range(n)]
        if cfg.model == "htc":
            vib_ladder = sp.diags(
                np.sqrt(np.arange(1, cfg.n_vib_levels)), 1, format="csr")
            self.b = [_embed(vib_ladder, 1 + n + i, dims) for i in range(n)]
        else:
            self.b = []

    def hamiltonian(self) -> sp.csr_matrix:
        """H in the frame implied by params.omega0 (0 = rotating frame)."""
        p = self.params
        omega_c = p.omega0 + p.delta
        h = omega_c * (self.a.conj().T @ self.a)
        g = p.g
        for i in range(p.n_emitters):
            sp_i = self.sm[i].conj().T
            h = h + 0.5 * p.omega0 * self.sz[i] \
                + g * (self.a @ sp_i + self.a.conj().T @ self.sm[i])
        if self.cfg.model == "htc":
            s = p.huang_rhys
            for i in range(p.n_emitters):
                bd = self.b[i].conj().T
                h = h + p.omega_nu * (bd @ self.b[i])
                if s > 0.0:
                    h = h + p.omega_nu * math.sqrt(s) * \
                        ((self.b[i] + bd) @ self.sz[i])
            if p.gamma_nu > 0.0:
                # momentum-damping Lamb shift i (gamma_nu/4) (b^dag^2 - b^2)
                for i in range(p.n_emitters):
                    bd = self.b[i].conj().T
                    h = h + 1j * 0.25 * p.gamma_nu * (bd @ bd - self.b[i] @ self.b[i])
        return sp.csr_matrix(h)

    def collapse_ops(self):
        """List of (rate, jump operator) pairs of the master equation."""
        p = self.params
        ops = []
        if p.kappa > 0.0:
            ops.append((p.kappa, self.a))
        for i in range(p.n_emitters):
            if p.gamma > 0.0:
                ops.append((p.gamma, self.sm[i]))
            if p.gamma_phi > 0.0:
                ops.append((p.gamma_phi, self.sz[i]))
        if self.cfg.model == "htc" and p.gamma_nu > 0.0:
            g_up, g_down = thermal_rates(p)
            for i in range(p.n_emitters):
                if g_up > 0.0:
                    ops.append((g_up, self.b[i].conj().T))
                ops.append((g_down, self.b[i]))
        return ops

    # ----- collective observables --------------------------------------

    def number_op(self):
        return self.a.conj().T @ self.a

    def mean_sp(self):
        n = self.params.n_emitters
        return sum(s.conj().T for s in self.sm) / n

    def mean_sz(self):
        return sum(self.sz) / self.params.n_emitters

    def j_squared(self):
        jx = sum(0.5 * (s + s.conj().T) for s in self.sm)
        jy = sum(0.5j * (s - s.conj().T) for s in self.sm)
        jz = sum(0.5 * z for z in self.sz)
        return jx @ jx + jy @ jy + jz @ jz

    def mean_vib_number(self):
        n = self.params.n_emitters
        return sum(b.conj().T @ b for b in self.b) / n

    def mean_vib_displacement(self):
        return sum(self.b) / self.params.n_emitters


def build_liouvillian(params: ModelParams, cfg: DenseConfig) -> sp.csr_matrix:
    """Sparse superoperator of the master equation, row-major vec."""
    ops = DenseOperators(params, cfg)
    return liouvillian_from_parts(ops.hamiltonian(), ops.collapse_ops(),
                                  ops.dim)


def liouvillian_from_parts(h, collapse, dim):
    eye = sp.identity(dim, format="csr", dtype=complex)
    lv = -1j * (sp.kron(h, eye, format="csr")
                - sp.kron(eye, h.T, format="csr"))
    for rate, x in collapse:
        xdx = (x.conj().T @ x).tocsr()
        lv = lv + rate * (sp.kron(x, x.conj(), format="csr")
                          - 0.5 * sp.kron(xdx, eye, format="csr")
                          - 0.5 * sp.kron(eye, xdx.T, format="csr"))
    return sp.csr_matrix(lv)


def initial_density(params: ModelParams, init: InitialCondition,
                    cfg: DenseConfig) -> np.ndarray:
    """rho(0): vacuum (x) tilted emitters [(x) thermal/ground vibrations]."""
    dims = _factors(params, cfg)
    vac = np.zeros((dims[0], dims[0]), dtype=complex)
    vac[0, 0] = 1.0
    rho = vac
    rho1 = single_emitter_density(init.theta)
    for _ in range(params.n_emitters):
        rho = np.kron(rho, rho1)
    if cfg.model == "htc":
        rho_vib = _thermal_vib(params, init, cfg.n_vib_levels)
        for _ in range(params.n_emitters):
            rho = np.kron(rho, rho_vib)
    return rho


def _thermal_vib(params, init, n_levels):
    if not init.vib_thermal or params.temperature == 0.0:
        rho = np.zeros((n_levels, n_levels), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    w = np.exp(-params.omega_nu * np.arange(n_levels) / params.temperature)
    # renormalized after truncation; the neglected tail is (e^-w/T)^n_levels
    return np.diag(w / w.sum()).astype(complex)


def evolve(params: ModelParams, init: InitialCondition, t_grid_fs,
           cfg: DenseConfig | None = None, rtol=1e-10, atol=1e-12,
           method="DOP853", health_checks=True) -> Trajectory:
    """Integrate the dense master equation on a time grid given in fs.

    The oracle runs at tighter tolerance than the solvers it certifies so
    its own error never dominates a comparison.  Hermiticity and positivity
    of rho are monitored on a subsample of grid points; a positivity
    violation beyond -1e-8 raises a PositivityWarning, not an error.
    """
    if cfg is None:
        cfg = DenseConfig(model="htc" if params.is_htc or params.gamma_nu > 0
                          else "tc")
    validate(params)
    lv = build_liouvillian(params, cfg)
    rho0 = initial_density(params, init, cfg)
    dim = rho0.shape[0]
    y0 = rho0.reshape(-1)

    ops = DenseOperators(params, cfg)
    rows = [sp.identity(dim, format="csr", dtype=complex),  # trace
            ops.number_op(), ops.mean_sp(), ops.mean_sz(), ops.j_squared()]
    if cfg.model == "htc":
        rows += [ops.mean_vib_number(), ops.mean_vib_displacement()]
    # Tr(O rho) = vec(O^T) . vec(rho) in row-major layout
    weights = sp.vstack([sp.csr_matrix(o.T.reshape(1, dim * dim))
                         for o in rows]).tocsr()

    t_grid_fs = np.asarray(t_grid_fs, dtype=float)
    t_int = fs_to_internal(t_grid_fs)

    hermiticity = []

    def check_state(i, t, y):
        rho = y.reshape(dim, dim)
        herm = np.abs(rho - rho.conj().T).max()
        hermiticity.append(herm)
        min_eig = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
        if min_eig < -1e-8:
            warnings.warn(
                f"density matrix eigenvalue {min_eig:.3e} at t = "
                f"{t_grid_fs[i]:.3g} fs", PositivityWarning)

    n_checks = min(len(t_int), 13)
    callback_idx = np.unique(np.linspace(0, len(t_int) - 1, n_checks)
                             .astype(int)) if health_checks else ()

    obs = observed_solve(lambda t, y: lv @ y, y0, t_int,
                         weights, rtol=rtol, atol=atol,
                         method=method,
                         state_callback=check_state if health_checks else None,
                         callback_indices=callback_idx)

    traj = Trajectory(
        times_fs=t_grid_fs,
        photon=obs[1].real,
        sz=obs[3].real,
        n_emitters=params.n_emitters,
        coherence=np.abs(obs[2]),
        j2=obs[4].real,
        trace_residual=obs[0].real - 1.0,
    )
    traj.extras["sigma_plus"] = obs[2]
    if cfg.model == "htc":
        traj.extras["vib_number"] = obs[5].real
        traj.extras["vib_displacement"] = obs[6]
    if health_checks and hermiticity:
        traj.extras["max_hermiticity_residual"] = float(max(hermiticity))
    return traj


def check_vib_convergence(params, init, t_grid_fs, cfg, columns=("photon",),
                          rtol=1e-10, atol=1e-12):
    """Max observable shift when the vibrational cutoff grows by two."""
    base = evolve(params, init, t_grid_fs, cfg, rtol=rtol, atol=atol,
                  health_checks=False)
    bigger = DenseConfig(model=cfg.model, n_photon_levels=cfg.n_photon_levels,
                         n_vib_levels=cfg.n_vib_levels + 2,
                         dim_cap=cfg.dim_cap)
    ref = evolve(params, init, t_grid_fs, bigger, rtol=rtol, atol=atol,
                 health_checks=False)
    shift = 0.0
    for col in columns:
        a = getattr(base, col) if hasattr(base, col) else base.extras[col]
        b = getattr(ref, col) if hasattr(ref, col) else ref.extras[col]
        shift = max(shift, float(np.abs(np.asarray(a) - np.asarray(b)).max()))
    return shift
