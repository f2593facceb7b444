from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarlab.channel import (Channel, bec, bhattacharyya, bsc, cutoff_rate, random_channel,
                              symmetric_capacity, symmetric_cutoff_rate)
from polarlab.polarize import (AlphabetTooLarge, BecProfile, MAX_LEVEL, branch_of,
                               bec_polarize, index_of, merge_equivalent_outputs,
                               normalized_cutoff, polar_pair, polarization_stats, profile_rows,
                               synthesize_all, synthesize_bit_channel, z_bound_recursion)

import oracles

seeds = st.integers(0, 2 ** 32 - 1)


def binary_channel(seed, outputs=(2, 4)):
    return random_channel(np.random.default_rng(seed), 2, outputs)


def test_branch_convention():
    assert branch_of(2, 1) == "--"
    assert branch_of(2, 2) == "-+"
    assert branch_of(2, 4) == "++"
    assert branch_of(0, 1) == ""
    for n in range(5):
        for i in range(1, 2 ** n + 1):
            assert index_of(branch_of(n, i)) == i
    with pytest.raises(ValueError):
        branch_of(2, 5)
    with pytest.raises(ValueError):
        index_of("-x")


def test_bec_pair_values():
    minus, plus = polar_pair(bec(0.5))
    assert symmetric_capacity(minus) == pytest.approx(0.25, abs=1e-12)
    assert symmetric_capacity(plus) == pytest.approx(0.75, abs=1e-12)
    assert bhattacharyya(minus) == pytest.approx(0.75, abs=1e-12)
    assert bhattacharyya(plus) == pytest.approx(0.25, abs=1e-12)


def test_pair_output_layout():
    W = bsc(0.2)
    minus, plus = polar_pair(W)
    t = W.transitions
    # W-(y1, y2 | u1) and W+(y1, y2, u1 | u2) straight from the definition
    for u1 in (0, 1):
        for y1 in (0, 1):
            for y2 in (0, 1):
                m = 0.5 * sum(t[u1 ^ u2, y1] * t[u2, y2] for u2 in (0, 1))
                assert minus.transitions[u1, y1 * 2 + y2] == pytest.approx(m, abs=1e-15)
                for u2 in (0, 1):
                    p = 0.5 * t[u1 ^ u2, y1] * t[u2, y2]
                    assert plus.transitions[u2, (y1 * 2 + y2) * 2 + u1] == pytest.approx(p, abs=1e-15)


def test_noiseless_channel_is_fixed():
    minus, plus = polar_pair(bsc(0))
    assert symmetric_capacity(minus) == pytest.approx(1.0, abs=1e-12)
    assert symmetric_capacity(plus) == pytest.approx(1.0, abs=1e-12)


def test_pair_needs_binary_input():
    from polarlab.channel import qec
    with pytest.raises(ValueError):
        polar_pair(qec(0.2))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_kernel_inequalities(seed):
    W = binary_channel(seed)
    minus, plus = polar_pair(W)
    c, cm, cp = symmetric_capacity(W), symmetric_capacity(minus), symmetric_capacity(plus)
    assert cm + cp == pytest.approx(2 * c, abs=1e-10)
    assert cm <= c + 1e-12 <= cp + 2e-12
    r, rm, rp = symmetric_cutoff_rate(W), symmetric_cutoff_rate(minus), symmetric_cutoff_rate(plus)
    assert rm + rp >= 2 * r - 1e-12
    z, zm, zp = bhattacharyya(W), bhattacharyya(minus), bhattacharyya(plus)
    assert zm + zp <= 2 * z + 1e-12
    assert zp == pytest.approx(z * z, abs=1e-12)
    if 1e-3 < z < 1 - 1e-3 and not np.allclose(W.transitions[0], W.transitions[1]):
        assert rm + rp > 2 * r
        assert cm < c < cp


@given(st.floats(0.0, 1.0))
def test_bec_z_relation_is_equality(eps):
    minus, plus = polar_pair(bec(eps))
    assert bhattacharyya(minus) + bhattacharyya(plus) == pytest.approx(2 * eps, abs=1e-12)


def test_synthesis_single_step():
    W = bsc(0.11)
    s = synthesize_bit_channel(W, 1, 1)
    assert s.channel == polar_pair(W)[0]
    assert s.branch == "-" and s.index == 1 and s.n == 1


def test_synthesis_conservation_bsc():
    W = bsc(0.11)
    total = sum(s.symmetric_capacity for s in synthesize_all(W, 2))
    assert total == pytest.approx(4 * symmetric_capacity(W), abs=1e-9)


def test_synthesis_bec_last_index():
    s = synthesize_bit_channel(bec(0.5), 2, 4)
    assert s.bhattacharyya == pytest.approx(0.0625, abs=1e-12)
    prof = bec_polarize(0.5, 2)
    exact = [x.bhattacharyya for x in synthesize_all(bec(0.5), 2)]
    assert np.allclose(exact, prof.eps, atol=1e-12)


def test_synthesis_matches_definition():
    # columns of W_4^(i) against the brute-force definition, compared as multisets
    p = Fraction(11, 100)
    Wf = oracles.exact_bsc(p)
    for i in range(1, 5):
        ref = sorted((float(a), float(b)) for a, b in oracles.bit_channel_columns(Wf, 2, i))
        got = sorted(map(tuple, synthesize_bit_channel(bsc(0.11), 2, i).channel.transitions.T))
        assert np.allclose(ref, got, atol=1e-15)


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(0, 1))
def test_recursive_equivalence(seed, n):
    W = binary_channel(seed)
    for i in range(1, 2 ** n + 1):
        base = synthesize_bit_channel(W, n, i).channel
        minus, plus = polar_pair(base)
        for child, ref in ((2 * i - 1, minus), (2 * i, plus)):
            s = synthesize_bit_channel(W, n + 1, child)
            assert s.symmetric_capacity == pytest.approx(symmetric_capacity(ref), abs=1e-12)
            assert s.bhattacharyya == pytest.approx(bhattacharyya(ref), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_merge_preserves_quantities(seed):
    W = synthesize_bit_channel(binary_channel(seed), 2, 2).channel
    M = merge_equivalent_outputs(W)
    assert M.output_size <= W.output_size
    assert symmetric_capacity(M) == pytest.approx(symmetric_capacity(W), abs=1e-12)
    assert bhattacharyya(M) == pytest.approx(bhattacharyya(W), abs=1e-12)


def test_merge_collapses_bsc_synthesis():
    W = synthesize_bit_channel(bsc(0.1), 2, 1).channel
    assert merge_equivalent_outputs(W).output_size < W.output_size


@settings(max_examples=30, deadline=None)
@given(seeds, seeds)
def test_output_coarsening_does_not_raise_cutoff(seed, mapseed):
    W = synthesize_bit_channel(binary_channel(seed), 2, 3).channel
    rng = np.random.default_rng(mapseed)
    groups = rng.integers(0, max(1, W.output_size // 2), size=W.output_size)
    coarse = np.vstack([np.bincount(groups, weights=row, minlength=groups.max() + 1)
                        for row in W.transitions])
    coarse = coarse[:, coarse.sum(axis=0) > 0]
    C = Channel(coarse / coarse.sum(axis=1, keepdims=True))
    assert cutoff_rate(C) <= cutoff_rate(W) + 1e-12


def test_alphabet_guard():
    with pytest.raises(AlphabetTooLarge, match="bec_polarize"):
        synthesize_bit_channel(bsc(0.1), 6, 64)
    with pytest.raises(AlphabetTooLarge):
        synthesize_all(bsc(0.1), 3, max_outputs=100)


def test_merged_synthesis_reaches_larger_levels():
    W = bsc(0.11)
    chans = synthesize_all(W, 4, merge=True)
    total = sum(s.symmetric_capacity for s in chans)
    assert total == pytest.approx(16 * symmetric_capacity(W), abs=1e-9)


# -- analytic recursions ----------------------------------------------------

def test_bec_profile_values():
    assert np.allclose(bec_polarize(0.5, 1).eps, [0.75, 0.25], atol=0)
    prof = bec_polarize(0.5, 2)
    assert np.allclose(prof.eps, [0.9375, 0.5625, 0.4375, 0.0625], atol=0)
    assert np.sum(1 - prof.eps) == pytest.approx(2.0, abs=1e-12)
    assert np.all(bec_polarize(0.0, 7).eps == 0)
    assert isinstance(prof, BecProfile) and len(prof) == 4


def test_bec_profile_complement_keeps_precision():
    prof = bec_polarize(0.3, 6)
    assert np.allclose(prof.eps + prof.complement, 1.0, atol=1e-12)
    # exact rational recursion as the reference for both tails
    e = [Fraction(3, 10)]
    for _ in range(6):
        e = [v for x in e for v in (x * (2 - x), x * x)]
    for k, x in enumerate(e):
        assert prof.eps[k] == pytest.approx(float(x), rel=1e-13)
        assert prof.complement[k] == pytest.approx(float(1 - x), rel=1e-13)


def test_level_guard():
    with pytest.raises(ValueError):
        bec_polarize(0.5, MAX_LEVEL + 1)
    with pytest.raises(ValueError):
        z_bound_recursion(0.5, -1)
    with pytest.raises(ValueError):
        bec_polarize(1.5, 2)


@given(st.floats(0.0, 1.0), st.integers(0, 10))
def test_z_bound_equals_bec_recursion(eps, n):
    assert np.allclose(z_bound_recursion(eps, n).z, bec_polarize(eps, n).eps, atol=1e-15)


@given(st.floats(0.0, 1.0))
def test_z_bound_step_identity(z):
    minus, plus = z_bound_recursion(z, 1).z
    assert minus + plus <= 2 * z + 1e-15
    assert minus + plus == pytest.approx(2 * z, abs=1e-15)


def test_z_bound_dominates_exact_bsc():
    W = bsc(0.11)
    bound = z_bound_recursion(bhattacharyya(W), 2).z
    exact = np.array([s.bhattacharyya for s in synthesize_all(W, 2)])
    assert np.all(bound >= exact - 1e-12)
    # '+' steps are exact: index 4 is '++', index 2 is '-+'
    assert bound[3] == pytest.approx(exact[3], abs=1e-10)
    one = z_bound_recursion(bhattacharyya(W), 1).z
    assert one[1] == pytest.approx(bhattacharyya(polar_pair(W)[1]), abs=1e-10)


def test_polarization_stats_basic():
    assert polarization_stats(np.zeros(8), 0.01).good_fraction == 1.0
    s = polarization_stats(bec_polarize(0.5, 10), 1e-3)
    assert s.good_fraction < 0.5
    assert sum(s) == pytest.approx(1.0)
    r = polarization_stats(1 - bec_polarize(0.5, 10).eps, 1e-3, kind="rate")
    assert r.good_fraction == pytest.approx(s.good_fraction)
    for bad in (0.0, 0.5, -1):
        with pytest.raises(ValueError):
            polarization_stats(np.zeros(4), bad)
    with pytest.raises(ValueError):
        polarization_stats([1.5], 0.1)


def test_middling_fraction_shrinks():
    mid = [polarization_stats(bec_polarize(0.5, n), 1e-3).middling_fraction for n in range(10, 21)]
    assert all(b <= a for a, b in zip(mid, mid[1:]))
    assert mid[-1] < 0.2


def test_normalized_cutoff():
    W = bec(0.5)
    assert normalized_cutoff(W) == pytest.approx(symmetric_cutoff_rate(W))
    assert normalized_cutoff(bec_polarize(0.5, 0)) == pytest.approx(symmetric_cutoff_rate(W))
    vals = [normalized_cutoff(bec_polarize(0.5, n)) for n in range(21)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))
    assert abs(vals[-1] - 0.5) < 0.05
    exact = synthesize_all(bsc(0.11), 2)
    assert normalized_cutoff(exact) >= symmetric_cutoff_rate(bsc(0.11))
    with pytest.raises(ValueError):
        normalized_cutoff([])
    with pytest.raises(ValueError):
        normalized_cutoff(synthesize_all(bsc(0.1), 1) + synthesize_all(bsc(0.1), 2))


def test_profile_rows():
    rows = profile_rows(bec_polarize(0.5, 2))
    assert [r["index"] for r in rows] == [1, 2, 3, 4]
    assert rows[0]["branch"] == "--"
    assert rows[3]["symmetric_capacity"] == pytest.approx(0.9375)
    zrows = profile_rows(z_bound_recursion(0.6, 1))
    assert zrows[0]["symmetric_capacity"] is None
    erows = profile_rows(exact=synthesize_all(bsc(0.11), 1))
    assert erows[1]["eps_or_z"] == pytest.approx(bhattacharyya(bsc(0.11)) ** 2)
