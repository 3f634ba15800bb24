"""Common trajectory container returned by every solver."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Trajectory:
    """Time grid (fs) plus observable columns.

    ``photon`` is <a^dag a>; ``sz`` the per-emitter <sigma^z>; ``coherence``
    |<sigma^+>| where the solver can produce it (mean-field, cumulant,
    dense; the block solver cannot, it evolves diagonal sectors only);
    ``j2`` the collective <J^2>; ``trace_residual`` trace(rho) - 1 for the
    density-matrix solvers.  ``extras`` carries solver-specific columns
    (vibrational occupation, displacement, ...).
    """

    times_fs: np.ndarray
    photon: np.ndarray
    sz: np.ndarray
    n_emitters: int
    coherence: np.ndarray | None = None
    j2: np.ndarray | None = None
    trace_residual: np.ndarray | None = None
    extras: dict = field(default_factory=dict)

    @property
    def n_over_n(self):
        return self.photon / self.n_emitters

    def __len__(self):
        return len(self.times_fs)
