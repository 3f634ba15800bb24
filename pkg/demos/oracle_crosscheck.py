"""Every solver in this package against the brute-force reference.

For a handful of emitters the master equation fits in memory explicitly,
so the block solver and the cumulant hierarchy can be judged against the
unarguable answer.  This is the same comparison the test suite runs; the
script exists to make the numbers easy to stare at.
"""

import numpy as np

from cavitysr import (InitialCondition, ModelParams, SolveOptions, solve,
                      solve_semiclassical, validate)
from cavitysr.dense import evolve

params = validate(ModelParams(n_emitters=4, g_collective=0.4, delta=-0.35,
                              kappa=0.01, gamma=0.001, gamma_phi=0.0075))
init = InitialCondition(theta=np.pi / 4)
t = np.linspace(0.0, 100.0, 201)

reference = evolve(params, init, t)
exact = solve(params, init, SolveOptions(t_grid_fs=t))
cumulant = solve_semiclassical("c2", params, init, t)
meanfield = solve_semiclassical("mf", params, init, t)

peak = reference.photon.max()
print(f"four emitters, tilted start; reference peak <n> = {peak:.4f}")
print(f"{'solver':>12} {'max |d<n>|':>12} {'max |d<n>|/peak':>16}")
for name, traj in (("exact", exact), ("cumulant", cumulant),
                   ("mean-field", meanfield)):
    err = np.abs(traj.photon - reference.photon).max()
    print(f"{name:>12} {err:12.3e} {err / peak:16.3e}")

print()
print("The block solver agrees to integrator tolerance; the closures do")
print("not and are not supposed to -- their job is the large-N regime the")
print("reference can never reach.")
