"""Permutation-symmetric emitter basis and U(1) excitation blocks.

The emitter part of the density matrix is expanded over operators O_m, one
per *pattern* m = (m_uu, m_du, m_ud, m_dd): the counts of emitters whose
single-site factor is the matrix unit |up><up|, |down><up|, |up><down| or
|down><down|.  O_m is the plain (unweighted) sum of all distinct
permutations of that product; with this normalization the expansion
coefficient of a product state is a simple monomial in the single-emitter
matrix elements and the trace functional carries binomial weights.

A full basis element is |n><n'| (x) O_m.  Its left/right excitation numbers
are  nu = n + m_uu + m_ud  and  nu' = n' + m_uu + m_du.  Sectors of fixed
nu - nu' evolve autonomously (weak U(1) symmetry of the master equation),
and every excitation-conserving observable (photon number, <sigma^z>,
<J^2>, trace) depends only on the diagonal sectors nu = nu'.  Starting
from a coherently tilted product state over cavity vacuum, projecting the
initial state onto the diagonal sectors is therefore exact for those
observables; that projection keeps precisely the patterns with
m_ud = m_du.

Canonical pattern order is lexicographic in (m_uu, m_du, m_ud), fixed
repo-wide so sparse operator layouts are reproducible.  Block members are
ordered by global pattern rank.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import InvalidPatternError, NuOutOfRangeError, ZeroEmittersError
from .params import single_emitter_density

# Pattern component indices: left/right single-site indices (up, down).
UU, DU, UD, DD = 0, 1, 2, 3


def n_patterns(n_emitters: int) -> int:
    """Number of patterns for N emitters: C(N+3, 3)."""
    return math.comb(n_emitters + 3, 3)


def enumerate_patterns(n_emitters: int) -> np.ndarray:
    """All weak compositions of N into (m_uu, m_du, m_ud, m_dd).

    Returned as an (n_patterns, 4) int array in the canonical lexicographic
    order of (m_uu, m_du, m_ud); row index equals ``pattern_rank``.
    """
    n = int(n_emitters)
    if n < 1:
        raise ZeroEmittersError(f"need at least one emitter, got {n_emitters}")
    out = np.empty((n_patterns(n), 4), dtype=np.int32)
    i = 0
    for m_uu in range(n + 1):
        for m_du in range(n - m_uu + 1):
            rest = n - m_uu - m_du
            k = rest + 1
            out[i:i + k, UU] = m_uu
            out[i:i + k, DU] = m_du
            out[i:i + k, UD] = np.arange(k)
            out[i:i + k, DD] = rest - np.arange(k)
            i += k
    return out


def pattern_rank(pattern, n_emitters: int):
    """Rank of a pattern in the canonical order, by direct arithmetic.

    Accepts a single 4-sequence or an (..., 4) array; no lookup table is
    used.  Components must be nonnegative and sum to N.
    """
    m = np.asarray(pattern, dtype=np.int64)
    n = int(n_emitters)
    if m.shape[-1] != 4:
        raise InvalidPatternError(f"pattern must have 4 components, got {m.shape}")
    if np.any(m < 0) or np.any(m.sum(axis=-1) != n):
        raise InvalidPatternError(
            f"pattern components must be >= 0 and sum to {n}")
    return _rank_unchecked(m[..., UU], m[..., DU], m[..., UD], n)


def _rank_unchecked(m_uu, m_du, m_ud, n):
    # patterns with first component < m_uu, then < m_du at fixed m_uu, then m_ud
    u, d, x = (np.asarray(a, dtype=np.int64) for a in (m_uu, m_du, m_ud))
    total = math.comb(n + 3, 3)
    head = total - (n - u + 3) * (n - u + 2) * (n - u + 1) // 6
    mid = d * (n - u + 1) - d * (d - 1) // 2
    r = head + mid + x
    return int(r) if r.ndim == 0 else r


def pattern_unrank(rank: int, n_emitters: int):
    """Inverse of ``pattern_rank``: the pattern at a given canonical rank."""
    n = int(n_emitters)
    total = math.comb(n + 3, 3)
    if not (0 <= rank < total):
        raise InvalidPatternError(f"rank {rank} outside 0..{total - 1}")
    r = int(rank)
    m_uu = 0
    while True:
        size = (n - m_uu + 2) * (n - m_uu + 1) // 2  # compositions with this m_uu
        if r < size:
            break
        r -= size
        m_uu += 1
    m_du = 0
    while True:
        size = n - m_uu - m_du + 1
        if r < size:
            break
        r -= size
        m_du += 1
    m_ud = r
    return (m_uu, m_du, m_ud, n - m_uu - m_du - m_ud)


def block_size(n_emitters: int, nu: int) -> int:
    """Number of members of diagonal block nu, without enumerating them.

    Counts patterns with m_uu + m_ud <= nu and m_uu + m_du <= nu.  Sizes
    grow monotonically from 1 at nu = 0 to C(N+3, 3) at nu = N.
    """
    n = int(n_emitters)
    if not (0 <= nu <= n):
        raise NuOutOfRangeError(f"nu must lie in 0..{n}, got {nu}")
    total = 0
    for u in range(nu + 1):
        a = nu - u          # bound on each of m_ud, m_du
        cap = n - u         # bound on m_ud + m_du
        if cap >= 2 * a:
            total += (a + 1) * (a + 1)
        else:
            # pairs (x, d) in [0, a]^2 with x + d <= cap
            total += (cap - a + 1) * (a + 1) \
                + (a * (a + 1) - (cap - a) * (cap - a + 1)) // 2
    return total


@dataclass(frozen=True)
class BlockIndex:
    """Members of one diagonal excitation block.

    ``pattern_idx`` are global pattern ranks (canonical order, ascending);
    ``patterns`` the corresponding (K, 4) rows; ``n``/``n_prime`` the
    photon indices forced by the excitation number.
    """

    nu: int
    pattern_idx: np.ndarray
    patterns: np.ndarray
    n: np.ndarray
    n_prime: np.ndarray

    def __len__(self):
        return len(self.pattern_idx)


@dataclass
class BlockState:
    """Coefficient vector of one diagonal block."""

    nu: int
    amps: np.ndarray


class BlockBasis:
    """Pattern table and per-block index machinery for N emitters.

    Construction is cheap; block member lists and rank-to-position lookups
    are built lazily and cached, so large-N counting queries never pay for
    full block enumeration.
    """

    def __init__(self, n_emitters: int):
        n = int(n_emitters)
        if n < 1:
            raise ZeroEmittersError(f"need at least one emitter, got {n_emitters}")
        self.n_emitters = n
        self.patterns = enumerate_patterns(n)
        self._blocks: dict[int, BlockIndex] = {}
        self._positions: dict[int, np.ndarray] = {}
        # max(left, right) excitation carried by the emitter part alone;
        # a pattern belongs to every block nu >= this threshold
        m = self.patterns
        self._nu_min = np.maximum(m[:, UU] + m[:, UD], m[:, UU] + m[:, DU])

    def rank(self, patterns):
        return pattern_rank(patterns, self.n_emitters)

    def block(self, nu: int) -> BlockIndex:
        """Member list of diagonal block nu (cached)."""
        n = self.n_emitters
        if not (0 <= nu <= n):
            raise NuOutOfRangeError(f"nu must lie in 0..{n}, got {nu}")
        cached = self._blocks.get(nu)
        if cached is None:
            idx = np.nonzero(self._nu_min <= nu)[0].astype(np.int64)
            pats = self.patterns[idx]
            n_left = nu - pats[:, UU] - pats[:, UD]
            n_right = nu - pats[:, UU] - pats[:, DU]
            cached = BlockIndex(nu, idx, pats,
                                n_left.astype(np.int64),
                                n_right.astype(np.int64))
            self._blocks[nu] = cached
        return cached

    def position_in_block(self, nu: int) -> np.ndarray:
        """Array mapping global pattern rank -> member position (-1 if absent)."""
        cached = self._positions.get(nu)
        if cached is None:
            blk = self.block(nu)
            pos = np.full(len(self.patterns), -1, dtype=np.int64)
            pos[blk.pattern_idx] = np.arange(len(blk), dtype=np.int64)
            cached = pos
            self._positions[nu] = cached
        return cached

    def block_sizes(self) -> np.ndarray:
        """Sizes of all diagonal blocks nu = 0..N (counting only)."""
        return np.array([block_size(self.n_emitters, nu)
                         for nu in range(self.n_emitters + 1)])

    # ----- observable weight vectors (per block) -----------------------

    def _binom(self, k):
        n = self.n_emitters
        lg = math.lgamma(n + 1)
        k = np.asarray(k, dtype=np.float64)
        return np.exp(lg - gammaln(k + 1) - gammaln(n - k + 1))

    def trace_weights(self, nu: int) -> np.ndarray:
        """w such that w . amps is this block's trace contribution.

        Only patterns with m_ud = m_du = 0 have nonzero trace; each of the
        C(N, m_uu) permutation terms contributes trace one.
        """
        blk = self.block(nu)
        m = blk.patterns
        w = np.zeros(len(blk))
        diag = (m[:, UD] == 0) & (m[:, DU] == 0)
        w[diag] = self._binom(m[diag, UU])
        return w

    def photon_weights(self, nu: int) -> np.ndarray:
        """Weights of <a^dag a>: n * C(N, m_uu) on diagonal patterns."""
        blk = self.block(nu)
        m = blk.patterns
        w = np.zeros(len(blk))
        diag = (m[:, UD] == 0) & (m[:, DU] == 0)
        w[diag] = blk.n[diag] * self._binom(m[diag, UU])
        return w

    def sz_sum_weights(self, nu: int) -> np.ndarray:
        """Weights of <sum_i sigma_i^z>: (m_uu - m_dd) C(N, m_uu)."""
        blk = self.block(nu)
        m = blk.patterns
        w = np.zeros(len(blk))
        diag = (m[:, UD] == 0) & (m[:, DU] == 0)
        w[diag] = (m[diag, UU] - m[diag, DD]) * self._binom(m[diag, UU])
        return w

    def j2_weights(self, nu: int) -> np.ndarray:
        """Weights of the exact collective <J^2>.

        J^2 = 3N/4 + sum_{i!=j} sigma_i^+ sigma_j^- + (1/4) sum_{i!=j}
        sigma_i^z sigma_j^z.  The cross-coherence term is supported on
        patterns with exactly one up-down and one down-up unit (multinomial
        weight N!/(m_uu! m_dd!)), the rest on diagonal patterns.
        """
        n = self.n_emitters
        blk = self.block(nu)
        m = blk.patterns
        w = np.zeros(len(blk))
        diag = (m[:, UD] == 0) & (m[:, DU] == 0)
        binom = self._binom(m[diag, UU])
        d = m[diag, UU] - m[diag, DD]
        w[diag] = binom * (3.0 * n / 4.0 + (d * d - n) / 4.0)
        pair = (m[:, UD] == 1) & (m[:, DU] == 1)
        m_uu = m[pair, UU]
        w[pair] = self._binom(m_uu) * (n - m_uu) * (n - m_uu - 1.0)
        return w


def initial_blocks(n_emitters: int, theta: float,
                   basis: BlockBasis | None = None) -> list[BlockState]:
    """Diagonal-block coefficients of the tilted product state over vacuum.

    With the cavity in vacuum (n = n' = 0) a pattern sits in the diagonal
    sector iff m_ud = m_du, in block nu = m_uu + m_ud, with amplitude equal
    to the product of single-emitter matrix elements (no multinomial
    factor: O_m is an unweighted permutation sum).  Off-diagonal sectors
    are dropped; they never influence diagonal-sector observables.
    """
    n = int(n_emitters)
    if basis is None:
        basis = BlockBasis(n)
    rho1 = single_emitter_density(theta)
    # matrix elements in pattern component order (uu, du, ud, dd)
    el = np.array([rho1[0, 0], rho1[1, 0], rho1[0, 1], rho1[1, 1]])
    states = [BlockState(nu, np.zeros(len(basis.block(nu)), dtype=complex))
              for nu in range(n + 1)]
    for m_uu in range(n + 1):
        for k in range((n - m_uu) // 2 + 1):
            m_dd = n - m_uu - 2 * k
            nu = m_uu + k
            amp = (el[UU] ** m_uu) * (el[UD] * el[DU]) ** k * (el[DD] ** m_dd)
            pos = basis.position_in_block(nu)[
                _rank_unchecked(m_uu, k, k, n)]
            states[nu].amps[pos] = amp
    return states
