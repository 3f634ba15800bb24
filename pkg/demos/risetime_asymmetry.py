"""Detuning asymmetry of the risetime: the vibronic fingerprint.

Sweeps the cavity detuning for three flavors of dephasing: none, a pure
Markovian dephasing rate, and real vibrational coupling.  The first two
give risetime curves symmetric in +/- delta; coherent vibrational
coupling shifts the optimum to negative detuning, where the cavity
matches the transition into vibrationally excited final states.
"""

import math
import pathlib

import numpy as np

from cavitysr import InitialCondition, ModelParams, validate
from cavitysr.analysis import SweepSpec, run_sweep
from cavitysr.cli import write_csv

OUT = pathlib.Path(__file__).resolve().parent

def base(huang_rhys=0.0, gamma_phi=0.0):
    return validate(ModelParams(
        n_emitters=10 ** 8, g_collective=0.2, delta=0.0, kappa=0.01,
        gamma=1e-6, gamma_phi=gamma_phi, omega_nu=0.15,
        huang_rhys=huang_rhys, gamma_nu=0.01, temperature=0.026))

deltas = np.round(np.arange(-0.30, 0.301, 0.05), 3)
init = InitialCondition(theta=1e-3 * math.pi)

tables = {}
for label, params in (("bare", base()),
                      ("dephasing", base(gamma_phi=0.02)),
                      ("vibronic", base(huang_rhys=0.2))):
    spec = SweepSpec(axis="delta", values=deltas, solver="mf", params=params,
                     init=init, t_grid_fs=np.linspace(0.0, 250.0, 5001))
    points = run_sweep(spec, jobs=2)
    tables[label] = {pt.value: pt for pt in points}

print(f"{'delta':>7} | {'bare':>8} | {'dephasing':>9} | {'vibronic':>8}")
rows = []
for d in deltas:
    cells = []
    for label in ("bare", "dephasing", "vibronic"):
        fit = tables[label][d].fit
        cells.append(f"{fit.tau_fs:8.3f}" if fit and fit.well_defined
                     else f"{'--':>8}")
    print(f"{d:7.2f} | {cells[0]} | {cells[1]:>9} | {cells[2]}")
    rows.append([d] + [
        (tables[label][d].fit.tau_fs
         if tables[label][d].fit and tables[label][d].fit.well_defined
         else "")
        for label in ("bare", "dephasing", "vibronic")])

path = OUT / "risetime_vs_detuning.csv"
write_csv(path, "sweep", "mf",
          ["delta", "tau_bare_fs", "tau_dephasing_fs", "tau_vibronic_fs"],
          rows)
print(f"\nwrote {path}")
print("Symmetric columns mean incoherent dephasing; a minimum pushed to")
print("delta < 0 is the signature of coherent vibrational coupling.")
