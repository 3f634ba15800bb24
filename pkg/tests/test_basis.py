import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavitysr.basis import (BlockBasis, block_size, enumerate_patterns,
                            initial_blocks, n_patterns, pattern_rank,
                            pattern_unrank)
from cavitysr.errors import (InvalidPatternError, NuOutOfRangeError,
                             ZeroEmittersError)


def brute_force_block_members(n, nu):
    """Independent enumeration of (pattern, photon) pairs with nu = nu'."""
    members = []
    for m in product(range(n + 1), repeat=4):
        if sum(m) != n:
            continue
        m_uu, m_du, m_ud, m_dd = m
        n_left = nu - m_uu - m_ud
        n_right = nu - m_uu - m_du
        if n_left >= 0 and n_right >= 0:
            members.append((m, n_left, n_right))
    return members


class TestEnumeration:
    def test_small_counts(self):
        assert len(enumerate_patterns(1)) == 4
        assert len(enumerate_patterns(10)) == 286

    def test_paper_scale_count(self):
        # C(143, 3) at the largest emitter number the solver targets
        assert n_patterns(140) == 477_191
        assert len(enumerate_patterns(140)) == 477_191

    def test_rows_are_valid_partitions(self):
        pats = enumerate_patterns(6)
        assert np.all(pats >= 0)
        assert np.all(pats.sum(axis=1) == 6)
        # all rows distinct
        assert len({tuple(r) for r in pats.tolist()}) == len(pats)

    def test_zero_emitters(self):
        with pytest.raises(ZeroEmittersError):
            enumerate_patterns(0)


class TestRanking:
    def test_first_and_last(self):
        pats = enumerate_patterns(7)
        assert pattern_rank(pats[0], 7) == 0
        assert pattern_rank(pats[-1], 7) == n_patterns(7) - 1

    def test_roundtrip_exhaustive_n6(self):
        pats = enumerate_patterns(6)
        for r, row in enumerate(pats.tolist()):
            assert pattern_rank(row, 6) == r
            assert pattern_unrank(r, 6) == tuple(row)

    def test_vectorized_matches_scalar(self):
        pats = enumerate_patterns(9)
        ranks = pattern_rank(pats, 9)
        assert np.array_equal(ranks, np.arange(len(pats)))

    def test_invalid_pattern(self):
        with pytest.raises(InvalidPatternError):
            pattern_rank((1, 1, 1, 1), 5)
        with pytest.raises(InvalidPatternError):
            pattern_rank((-1, 2, 2, 2), 5)

    @given(st.integers(min_value=1, max_value=40),
           st.integers(min_value=0, max_value=10 ** 6))
    @settings(max_examples=60)
    def test_roundtrip_random(self, n, seed):
        r = seed % n_patterns(n)
        assert pattern_rank(pattern_unrank(r, n), n) == r


class TestBlockMembers:
    def test_n2_block_sizes(self):
        basis = BlockBasis(2)
        assert len(basis.block(0)) == 1
        assert len(basis.block(1)) == 5
        assert len(basis.block(2)) == 10

    def test_n2_nu0_member(self):
        blk = BlockBasis(2).block(0)
        assert blk.patterns.tolist() == [[0, 0, 0, 2]]
        assert blk.n.tolist() == [0] and blk.n_prime.tolist() == [0]

    def test_n2_nu1_members(self):
        blk = BlockBasis(2).block(1)
        members = {tuple(m) for m in blk.patterns.tolist()}
        assert members == {(0, 0, 0, 2), (1, 0, 0, 1), (0, 1, 1, 0),
                           (0, 1, 0, 1), (0, 0, 1, 1)}

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
    def test_against_brute_force(self, n):
        basis = BlockBasis(n)
        for nu in range(n + 1):
            blk = basis.block(nu)
            got = {(tuple(m), int(a), int(b))
                   for m, a, b in zip(blk.patterns.tolist(), blk.n,
                                      blk.n_prime)}
            expected = {(m, a, b)
                        for m, a, b in brute_force_block_members(n, nu)}
            assert got == expected
            assert block_size(n, nu) == len(expected)

    def test_photon_indices_nonnegative(self):
        basis = BlockBasis(6)
        for nu in range(7):
            blk = basis.block(nu)
            assert blk.n.min() >= 0 and blk.n_prime.min() >= 0

    def test_nu_out_of_range(self):
        with pytest.raises(NuOutOfRangeError):
            BlockBasis(3).block(4)
        with pytest.raises(NuOutOfRangeError):
            block_size(3, -1)

    def test_sizes_monotone_up_to_140(self):
        for n in (1, 2, 7, 30, 140):
            sizes = [block_size(n, nu) for nu in range(n + 1)]
            assert sizes[0] == 1
            assert sizes[-1] == n_patterns(n)
            assert all(b > a for a, b in zip(sizes, sizes[1:]))


class TestInitialBlocks:
    def test_fully_inverted(self):
        states = initial_blocks(5, 0.0)
        for nu in range(5):
            assert np.all(states[nu].amps == 0)
        top = states[5]
        basis = BlockBasis(5)
        pos = np.nonzero(top.amps)[0]
        assert len(pos) == 1
        assert top.amps[pos[0]] == pytest.approx(1.0)
        assert basis.block(5).patterns[pos[0]].tolist() == [5, 0, 0, 0]

    def test_all_ground(self):
        states = initial_blocks(4, math.pi)
        assert states[0].amps[0] == pytest.approx(1.0)
        for nu in range(1, 5):
            assert np.abs(states[nu].amps).max() < 1e-30

    def test_n1_half_tilt(self):
        states = initial_blocks(1, math.pi / 2)
        basis = BlockBasis(1)
        blk1 = basis.block(1)
        amps1 = states[1].amps
        nz = {tuple(blk1.patterns[i]): amps1[i]
              for i in np.nonzero(amps1)[0]}
        assert set(nz) == {(1, 0, 0, 0)}
        assert nz[(1, 0, 0, 0)] == pytest.approx(0.5)
        assert states[0].amps[0] == pytest.approx(0.5)

    @pytest.mark.parametrize("n", [1, 2, 4, 8])
    @pytest.mark.parametrize("theta", [0.0, 0.3, math.pi / 4, math.pi / 2,
                                       2.5, math.pi])
    def test_unit_trace(self, n, theta):
        basis = BlockBasis(n)
        states = initial_blocks(n, theta, basis)
        total = sum(basis.trace_weights(s.nu) @ s.amps.real for s in states)
        assert total == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("theta", [0.0, 0.7, math.pi / 2])
    def test_initial_inversion(self, theta):
        n = 6
        basis = BlockBasis(n)
        states = initial_blocks(n, theta, basis)
        sz = sum(basis.sz_sum_weights(s.nu) @ s.amps.real for s in states) / n
        assert sz == pytest.approx(math.cos(theta), abs=1e-12)

    @pytest.mark.parametrize("theta", [0.0, 0.7, math.pi / 2])
    def test_initial_j2_is_maximal(self, theta):
        # spin-coherent states maximize the collective Bloch vector
        n = 5
        basis = BlockBasis(n)
        states = initial_blocks(n, theta, basis)
        j2 = sum(basis.j2_weights(s.nu) @ s.amps.real for s in states)
        assert j2 == pytest.approx((n / 2) * (n / 2 + 1), abs=1e-10)


class TestTripleCountConsistency:
    @pytest.mark.parametrize("n", [1, 3, 5, 8])
    def test_total_elements(self, n):
        # sum of block sizes == number of (pattern, n, n') triples with
        # equal left/right excitation, counted independently
        basis = BlockBasis(n)
        total = sum(len(basis.block(nu)) for nu in range(n + 1))
        brute = sum(len(brute_force_block_members(n, nu))
                    for nu in range(n + 1))
        assert total == brute
