"""Unit conventions.

All energies and rates are in eV with hbar = 1, so internal solver time is
measured in hbar/eV.  Everything user-facing (time grids, risetimes, CSV
columns) is in femtoseconds; these helpers convert at the boundary.
"""

# hbar in eV*fs, defined constant (CODATA value, exact by convention here)
HBAR_EV_FS = 0.6582119569


def fs_to_internal(t_fs):
    """Convert time in fs to internal units of hbar/eV."""
    return t_fs / HBAR_EV_FS


def internal_to_fs(t):
    """Convert internal time (hbar/eV) to fs."""
    return t * HBAR_EV_FS
