import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarlab.channel import bec, bsc, cutoff_rate, qec, random_channel
from polarlab.ensembles import (BlockCode, EnumerationTooLarge, bhattacharyya_product,
                                ensemble_pairwise_average, gf2_rank, guesswork_ensemble,
                                guesswork_exact, massey_split, pairwise_error_exact,
                                pinsker_analysis, read_bit_rows, union_bound)

import oracles

HAMMING = [[1, 0, 0, 0, 1, 1, 0],
           [0, 1, 0, 0, 1, 0, 1],
           [0, 0, 1, 0, 0, 1, 1],
           [0, 0, 0, 1, 1, 1, 1]]


def _pairwise_oracle(c, c2, W):
    """Sum of W^N(y|c) over outputs with W^N(y|c2) >= W^N(y|c), by plain loops."""
    t = W.transitions
    total = 0.0
    for y in itertools.product(range(W.output_size), repeat=len(c)):
        a = math.prod(t[x, v] for x, v in zip(c, y))
        b = math.prod(t[x, v] for x, v in zip(c2, y))
        if b >= a * (1 - 1e-12):
            total += a
    return total


def test_block_code_basics():
    code = BlockCode.from_generator([[1, 1]])
    assert code.codewords.tolist() == [[0, 0], [1, 1]]
    assert code.M == 2 and code.N == 2 and code.rate == 0.5
    with pytest.raises(ValueError):
        BlockCode(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        BlockCode([[-1, 0]])
    assert gf2_rank(HAMMING) == 4
    assert gf2_rank([[1, 1], [1, 1]]) == 1


def test_pairwise_examples():
    same = BlockCode([[0, 1], [0, 1]])
    assert pairwise_error_exact(same, bsc(0.2), 0, 1) == pytest.approx(1.0)
    single = BlockCode([[0], [1]])
    assert pairwise_error_exact(single, bsc(0.25), 0, 1) == pytest.approx(0.25)
    rep = BlockCode([[0, 0], [1, 1]])
    assert pairwise_error_exact(rep, bsc(0.25), 0, 1) == pytest.approx(0.4375)
    with pytest.raises(ValueError):
        pairwise_error_exact(rep, bsc(0.25), 0, 0)
    with pytest.raises(ValueError):
        pairwise_error_exact(rep, bsc(0.25), 0, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
def test_pairwise_below_bhattacharyya_product(seed, N):
    rng = np.random.default_rng(seed)
    W = random_channel(rng, inputs=int(rng.integers(2, 4)), outputs=(2, 3))
    code = BlockCode(rng.integers(0, W.input_size, size=(2, N)))
    p = pairwise_error_exact(code, W, 0, 1)
    assert p == pytest.approx(_pairwise_oracle(code.codewords[0], code.codewords[1], W), abs=1e-12)
    assert p <= bhattacharyya_product(code, W, 0, 1) + 1e-12


def test_ensemble_average_examples():
    r = ensemble_pairwise_average(1, bsc(0.25))
    assert r.average == pytest.approx(0.625, abs=1e-12)
    assert r.bound == pytest.approx(2 ** -cutoff_rate(bsc(0.25)), abs=1e-12)
    assert r.average <= r.bound
    for N in (1, 2, 3):
        assert ensemble_pairwise_average(N, bsc(0)).average == pytest.approx(2.0 ** -N, abs=1e-12)
    r3 = ensemble_pairwise_average(3, bsc(0.11))
    assert r3.average <= 2 ** (-3 * 0.2988683857551698)


@pytest.mark.parametrize("W", [bsc(0.25), bsc(0.11), bec(0.3), qec(0.4)])
@pytest.mark.parametrize("N", [1, 2, 3])
def test_single_letter_factorization(W, N):
    r = ensemble_pairwise_average(N, W)
    assert r.bhattacharyya_average == pytest.approx(r.single_letter, abs=1e-10)
    assert r.single_letter == pytest.approx(r.bound, abs=1e-10)
    assert r.average <= r.bound + 1e-12


def test_ensemble_average_by_brute_force():
    W = bsc(0.11)
    N = 2
    words = list(itertools.product((0, 1), repeat=N))
    ref = np.mean([_pairwise_oracle(a, b, W) for a in words for b in words])
    assert ensemble_pairwise_average(N, W).average == pytest.approx(ref, abs=1e-12)


def test_enumeration_guard():
    with pytest.raises(EnumerationTooLarge):
        ensemble_pairwise_average(12, qec(0.1))


def test_guesswork_examples():
    rep = BlockCode([[0, 0], [1, 1]])
    g = guesswork_exact(rep, bsc(0.25))
    assert g.expected == pytest.approx(0.25, abs=1e-12)
    assert g.pairwise_sum == pytest.approx(0.4375, abs=1e-12)
    distinct = BlockCode([[0, 0], [0, 1], [1, 0], [1, 1]])
    assert guesswork_exact(distinct, bsc(0)).expected == 0.0
    with pytest.raises(ValueError):
        guesswork_exact(rep, bsc(0.25), tie_break="random")


def test_guesswork_equals_pairwise_sum_without_ties():
    # distinct weights and generic likelihoods leave no ties between codewords
    W = random_channel(np.random.default_rng(5), 2, 3)
    code = BlockCode([[0, 0, 0], [0, 1, 1], [1, 1, 1]])
    g = guesswork_exact(code, W)
    assert g.expected == pytest.approx(g.pairwise_sum, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_guesswork_at_most_pairwise_sum(seed):
    rng = np.random.default_rng(seed)
    code = BlockCode(rng.integers(0, 2, size=(4, 3)))
    for tie in ("lower", "higher"):
        g = guesswork_exact(code, bsc(0.2), tie_break=tie)
        assert g.expected <= g.pairwise_sum + 1e-12


def test_guesswork_ensemble_bound():
    r = guesswork_ensemble(4, 4, bsc(0.11), samples=200, seed=1)
    assert r.mean <= r.bound
    assert r.bound == pytest.approx(2 ** (4 * (0.5 - cutoff_rate(bsc(0.11)))), rel=1e-12)


def test_guesswork_grows_above_cutoff_rate():
    # random codes at R = 1/2 > R0 on BSC(0.11)
    means = [guesswork_ensemble(N, 2 ** (N // 2), bsc(0.11), samples=150, seed=N).mean
             for N in (2, 4, 6)]
    assert means[0] < means[1] < means[2]


def test_massey_examples():
    r = massey_split(0.25)
    assert r["cutoff_qec"] == pytest.approx(1.1926, abs=1e-4)
    assert r["cutoff_split"] == pytest.approx(1.3561, abs=1e-4)
    assert r["cutoff_gain"] == pytest.approx(0.1635, abs=1e-4)
    zero = massey_split(0.0)
    for key in ("capacity_qec", "cutoff_qec", "capacity_split", "cutoff_split"):
        assert zero[key] == pytest.approx(2.0, abs=1e-12)
        assert massey_split(1.0)[key] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        massey_split(1.2)


@pytest.mark.parametrize("eps", np.round(np.arange(0.1, 0.95, 0.1), 2))
def test_massey_gain_positive(eps):
    r = massey_split(eps)
    assert r["capacity_split"] == pytest.approx(r["capacity_qec"], abs=1e-12)
    assert r["cutoff_split"] > r["cutoff_qec"]


def test_pinsker_repetition():
    r = pinsker_analysis([[1, 1, 1]], 0.1)
    assert r["frame_error"] == pytest.approx(3 * 0.01 * 0.9 + 0.001, abs=1e-12)
    assert r["frame_cutoff_rate"] == pytest.approx(0.5886, abs=1e-4)
    clean = pinsker_analysis(HAMMING, 0.0)
    assert clean["frame_error"] == 0.0
    assert clean["bit_cutoff_rates"] == [1.0] * 4
    assert clean["aggregate_cutoff"] == pytest.approx(4.0)


def test_pinsker_hamming_matches_ml_oracle():
    p = 0.05
    r = pinsker_analysis(HAMMING, p)
    code = BlockCode.from_generator(HAMMING)
    pe = 0.0
    pi = np.zeros(4)
    for e in itertools.product((0, 1), repeat=7):
        w = p ** sum(e) * (1 - p) ** (7 - sum(e))
        m = oracles.ml_decode_bsc(code.codewords, np.array(e))
        if m:
            pe += w
        pi += w * np.array([(m >> (3 - i)) & 1 for i in range(4)])
    assert r["frame_error"] == pytest.approx(pe, abs=1e-12)
    assert np.allclose(r["bit_errors"], pi, atol=1e-12)
    assert all(b <= pe + 1e-15 for b in r["bit_errors"])
    assert r["aggregate_cutoff"] >= 4 * r["frame_cutoff_rate"]
    assert r["uniformly_good"]


def test_pinsker_guards():
    with pytest.raises(ValueError):
        pinsker_analysis([[1, 1, 0], [1, 1, 0]], 0.1)
    with pytest.raises(EnumerationTooLarge):
        pinsker_analysis(np.eye(11, 15, dtype=int), 0.1)


def test_union_bound():
    W = bsc(0.11)
    assert union_bound(50, cutoff_rate(W), None, W).value == pytest.approx(1.0)
    ub = union_bound(100, 0.1, None, W)
    assert ub.value == pytest.approx(2 ** (-100 * (cutoff_rate(W) - 0.1)))
    assert ub.value == pytest.approx(1.03e-6, rel=0.01)
    assert not ub.vacuous
    assert union_bound(10, 0.5, None, W).vacuous


def test_read_bit_rows():
    G = read_bit_rows("# generator\n1 0 1\n0,1,1\n\n")
    assert G.tolist() == [[1, 0, 1], [0, 1, 1]]
    with pytest.raises(ValueError):
        read_bit_rows("102\n")
    with pytest.raises(ValueError):
        read_bit_rows("10\n1\n")
