"""Sparse generators of the dissipative Tavis-Cummings master equation in
the permutation/U(1) block basis.

For each diagonal excitation block nu the dynamics reads

    d rho^(nu) / dt = L0(nu) rho^(nu) + L1(nu) rho^(nu+1)

with L0 collecting every excitation-conserving term (coherent coupling,
photon phases, all anticommutator halves, the dephasing sandwich) and L1
the two loss sandwiches feeding block nu from nu+1.  Jump operators change
the excitation number by at most one and there is no gain, so no other
couplings occur.

Matrix elements follow from the action of summed single-site maps on the
unweighted permutation sum O_m: moving one emitter from bin p to bin q
turns O_m into (m_q + 1) O_{m - e_p + e_q}; a diagonal single-site map
contributes a factor m_p.  None of these elements appear in closed form in
standard references; they are derived here and gated by the dense-solver
equivalence tests (tests/test_generator.py) before any large-N use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .basis import BlockBasis, DD, DU, UD, UU, _rank_unchecked
from .errors import (EmptySourceBinError, HTCNotSupportedError,
                     InvalidPatternError, NuOutOfRangeError)
from .params import ModelParams

# Coherent-coupling transition table.  Each entry is one term of
# -i g [a J^+ + a^dag J^-, .] acting on a basis element from the left or
# the right: (source bin p, target bin q, photon side/shift, sign of i*g).
# 'n-1'  : left photon index decreases, factor sqrt(n)   (a on the left)
# 'n+1'  : left photon index increases, factor sqrt(n+1) (a^dag on the left)
# "n'-1" / "n'+1": same for the right photon index.
_COUPLING_RULES = (
    (DU, UU, "n-1", -1.0),   # a sigma^+ rho
    (DD, UD, "n-1", -1.0),
    (UU, DU, "n+1", -1.0),   # a^dag sigma^- rho
    (UD, DD, "n+1", -1.0),
    (UU, UD, "n'+1", +1.0),  # rho a sigma^+
    (DU, DD, "n'+1", +1.0),
    (UD, UU, "n'-1", +1.0),  # rho a^dag sigma^-
    (DD, DU, "n'-1", +1.0),
)


def single_site_transition(pattern, p: int, q: int):
    """Action of a summed single-site map sum_i (p -> q) on O_pattern.

    Returns (new_pattern, integer factor): for p != q the pattern loses one
    emitter from bin p and gains one in bin q with combinatorial factor
    m_q + 1; for p = q the pattern is unchanged and the factor counts the
    emitters in bin p.
    """
    m = tuple(int(c) for c in pattern)
    if len(m) != 4 or any(c < 0 for c in m):
        raise InvalidPatternError(f"not a valid pattern: {pattern}")
    if p == q:
        return m, m[p]
    if m[p] < 1:
        raise EmptySourceBinError(
            f"pattern {m} has no emitter in bin {p} to move")
    new = list(m)
    new[p] -= 1
    new[q] += 1
    return tuple(new), m[q] + 1


@dataclass(frozen=True)
class SparseBlockOp:
    """Sparse operator between diagonal blocks (source_nu -> target_nu)."""

    matrix: sp.csr_matrix
    source_nu: int
    target_nu: int

    @property
    def shape(self):
        return self.matrix.shape


class _NeighborTable:
    """Pattern rank -> rank of pattern - e_p + e_q, for all 12 moves."""

    def __init__(self, basis: BlockBasis):
        self.basis = basis
        n = basis.n_emitters
        m = basis.patterns.astype(np.int64)
        self.maps = {}
        for p in range(4):
            for q in range(4):
                if p == q:
                    continue
                valid = m[:, p] >= 1
                shifted = m.copy()
                shifted[:, p] -= 1
                shifted[:, q] += 1
                ranks = np.full(len(m), -1, dtype=np.int64)
                ranks[valid] = _rank_unchecked(
                    shifted[valid, UU], shifted[valid, DU],
                    shifted[valid, UD], n)
                self.maps[(p, q)] = ranks


def _neighbors(basis: BlockBasis) -> _NeighborTable:
    table = getattr(basis, "_neighbor_table", None)
    if table is None:
        table = _NeighborTable(basis)
        basis._neighbor_table = table
    return table


def _photon_shift(kind, n, n_prime):
    """(validity mask, sqrt factor) for one coupling rule."""
    if kind == "n-1":
        return n >= 1, np.sqrt(np.maximum(n, 0))
    if kind == "n+1":
        return np.ones(len(n), dtype=bool), np.sqrt(n + 1.0)
    if kind == "n'-1":
        return n_prime >= 1, np.sqrt(np.maximum(n_prime, 0))
    if kind == "n'+1":
        return np.ones(len(n), dtype=bool), np.sqrt(n_prime + 1.0)
    raise ValueError(kind)


def build_L0(params: ModelParams, basis: BlockBasis, nu: int) -> SparseBlockOp:
    """Within-block generator L0(nu) for the TC model (S must be 0)."""
    if params.huang_rhys != 0.0:
        raise HTCNotSupportedError(
            "the block solver treats the plain TC model only (S = 0)")
    p = params.rotating()
    blk = basis.block(nu)
    m = blk.patterns.astype(np.int64)
    n, n_p = blk.n, blk.n_prime
    k = len(blk)
    pos = basis.position_in_block(nu)
    nbr = _neighbors(basis)
    g = p.g if p.g_collective > 0 else 0.0

    rows = []
    cols = []
    vals = []

    # diagonal: photon phase, anticommutator halves, dephasing sandwich
    diag = (-1j * p.delta * (n - n_p)
            - 0.5 * p.kappa * (n + n_p)
            - 0.5 * p.gamma * (2 * m[:, UU] + m[:, UD] + m[:, DU])
            - 2.0 * p.gamma_phi * (m[:, UD] + m[:, DU]))
    src_all = np.arange(k, dtype=np.int64)
    rows.append(src_all)
    cols.append(src_all)
    vals.append(diag.astype(complex))

    if g != 0.0:
        for (pb, qb, kind, sign) in _COUPLING_RULES:
            ok, factor = _photon_shift(kind, n, n_p)
            ok = ok & (m[:, pb] >= 1)
            if not np.any(ok):
                continue
            src = src_all[ok]
            tgt_rank = nbr.maps[(pb, qb)][blk.pattern_idx[ok]]
            tgt = pos[tgt_rank]
            amp = (sign * 1j * g) * factor[ok] * (m[ok, qb] + 1.0)
            rows.append(tgt)
            cols.append(src)
            vals.append(amp.astype(complex))

    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(k, k)).tocsr()
    return SparseBlockOp(mat, source_nu=nu, target_nu=nu)


def build_L1(params: ModelParams, basis: BlockBasis, nu: int) -> SparseBlockOp:
    """Loss feed L1(nu): block nu+1 -> nu (cavity and emitter sandwiches)."""
    n_em = basis.n_emitters
    if not (0 <= nu < n_em):
        raise NuOutOfRangeError(f"L1 target nu must lie in 0..{n_em - 1}, got {nu}")
    if params.huang_rhys != 0.0:
        raise HTCNotSupportedError(
            "the block solver treats the plain TC model only (S = 0)")
    p = params.rotating()
    src_blk = basis.block(nu + 1)
    tgt_pos = basis.position_in_block(nu)
    nbr = _neighbors(basis)
    m = src_blk.patterns.astype(np.int64)
    n, n_p = src_blk.n, src_blk.n_prime
    src_all = np.arange(len(src_blk), dtype=np.int64)

    rows = []
    cols = []
    vals = []

    if p.kappa != 0.0:
        # kappa a rho a^dag: photons (n, n') -> (n-1, n'-1), pattern kept
        ok = (n >= 1) & (n_p >= 1)
        if np.any(ok):
            tgt = tgt_pos[src_blk.pattern_idx[ok]]
            amp = p.kappa * np.sqrt(n[ok] * n_p[ok])
            rows.append(tgt)
            cols.append(src_all[ok])
            vals.append(amp.astype(complex))

    if p.gamma != 0.0:
        # gamma sigma^- rho sigma^+: single-site sandwich uu -> dd
        ok = m[:, UU] >= 1
        if np.any(ok):
            tgt_rank = nbr.maps[(UU, DD)][src_blk.pattern_idx[ok]]
            tgt = tgt_pos[tgt_rank]
            amp = p.gamma * (m[ok, DD] + 1.0)
            rows.append(tgt)
            cols.append(src_all[ok])
            vals.append(amp.astype(complex))

    shape = (len(basis.block(nu)), len(src_blk))
    if rows:
        mat = sp.coo_matrix(
            (np.concatenate(vals),
             (np.concatenate(rows), np.concatenate(cols))),
            shape=shape).tocsr()
    else:
        mat = sp.csr_matrix(shape, dtype=complex)
    return SparseBlockOp(mat, source_nu=nu + 1, target_nu=nu)


def assemble_joint(params: ModelParams, basis: BlockBasis):
    """Stack all diagonal blocks into one sparse generator.

    Returns (A, offsets) where A is the block upper-bidiagonal CSR matrix
    over the concatenated state and offsets[nu] is the first index of
    block nu (offsets has length N + 2, last entry = total dimension).
    """
    n = basis.n_emitters
    sizes = [len(basis.block(nu)) for nu in range(n + 1)]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    blocks = [[None] * (n + 1) for _ in range(n + 1)]
    for nu in range(n + 1):
        blocks[nu][nu] = build_L0(params, basis, nu).matrix
        if nu < n:
            blocks[nu][nu + 1] = build_L1(params, basis, nu).matrix
    joint = sp.bmat(blocks, format="csr", dtype=complex)
    return joint, offsets
