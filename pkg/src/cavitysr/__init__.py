"""Dynamical superradiance of N emitters in a lossy single-mode cavity.

Solvers:

* :mod:`cavitysr.blocksolver` -- exact permutation/U(1) block integration
  of the dissipative Tavis-Cummings model.
* :mod:`cavitysr.dense` -- brute-force reference solver on the explicit
  Hilbert space (TC and HTC), the oracle for everything else.
* :mod:`cavitysr.semiclassical` -- mean-field and second-order cumulant
  dynamics, including the Holstein-Tavis-Cummings model at mean-field
  level.
* :mod:`cavitysr.analysis` -- risetime extraction and parameter sweeps.
"""

from .params import (InitialCondition, ModelParams, bose_occupation,
                     single_emitter_density, thermal_rates,
                     to_rotating_frame, validate)
from .basis import (BlockBasis, BlockIndex, BlockState, block_size,
                    enumerate_patterns, initial_blocks, n_patterns,
                    pattern_rank, pattern_unrank)
from .generator import SparseBlockOp, build_L0, build_L1, single_site_transition
from .blocksolver import (SolveOptions, collective_correlator, photon_number,
                          solve, sz_mean, trace)
from .dense import DenseConfig, build_liouvillian, evolve
from .semiclassical import c2_rhs, mf_rhs, solve_semiclassical
from .analysis import (FitResult, SweepSpec, detect_window, extract_risetime,
                       fit_risetime, run_sweep)
from .trajectory import Trajectory
from .units import HBAR_EV_FS

__version__ = "0.1.0"
