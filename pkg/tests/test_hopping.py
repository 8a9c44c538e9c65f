from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from qrendezvous.codec import make_codeword
from qrendezvous.hopping import (
    ChannelSet,
    ModularClockParams,
    MultiRadioUser,
    QrUserState,
    RandomUser,
    is_prime,
    modular_clock_step,
    multi_radio_next,
    partition_round_robin,
    qr_next,
    random_step,
    two_primes_at_least,
)


def sieve(limit):
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for k in range(2, int(limit**0.5) + 1):
        if flags[k]:
            flags[k * k::k] = False
    return np.flatnonzero(flags)


# --- primes ----------------------------------------------------------------------

@pytest.mark.parametrize("n, expected", [(7, (7, 11)), (5, (5, 7)), (1, (2, 3)), (2, (2, 3)), (8, (11, 13))])
def test_two_primes_at_least(n, expected):
    assert two_primes_at_least(n) == expected


def test_primes_match_sieve_and_stay_below_3n():
    primes = sieve(10_000)
    assert [p for p in range(10_000) if is_prime(p)] == list(primes)
    for n in range(1, 3000):
        p0, p1 = two_primes_at_least(n)
        i = np.searchsorted(primes, n)
        assert (p0, p1) == (primes[i], primes[i + 1])
        assert p1 <= 3 * n


# --- channel sets ----------------------------------------------------------------

def test_channel_set_validation():
    assert ChannelSet.of([3, 1, 2], 5).channels == (1, 2, 3)
    with pytest.raises(ValueError):
        ChannelSet((2, 1), 5)
    with pytest.raises(ValueError):
        ChannelSet((0, 5), 5)
    with pytest.raises(ValueError):
        ChannelSet((), 5)


def test_modular_clock_params_validation():
    with pytest.raises(ValueError):
        ModularClockParams(8, 1, 0)
    with pytest.raises(ValueError):
        ModularClockParams(7, 0, 0)
    with pytest.raises(ValueError):
        ModularClockParams(7, 1, 7)


# --- modular clock ---------------------------------------------------------------

def test_modular_clock_deterministic_branch():
    rng = np.random.default_rng(0)
    assert modular_clock_step(ChannelSet.of(range(7), 15), ModularClockParams(7, 1, 0), 3, rng) == 3
    # k = (2*4 + 3) mod 5 = 1 -> c(1)
    assert modular_clock_step(ChannelSet.of(range(6, 11), 15), ModularClockParams(5, 2, 3), 4, rng) == 7


def test_modular_clock_random_branch_is_uniform():
    chans = ChannelSet.of(range(7), 15)
    rng = np.random.default_rng(1)
    draws = [modular_clock_step(chans, ModularClockParams(11, 1, 0), 9, rng) for _ in range(14_000)]
    counts = np.bincount(draws, minlength=7)
    assert stats.chisquare(counts).pvalue > 1e-3


def test_modular_clock_rejects_short_period():
    with pytest.raises(ValueError):
        modular_clock_step(ChannelSet.of(range(7), 15), ModularClockParams(5, 1, 0), 0,
                           np.random.default_rng(0))


def _crt_hits(set1, set2, p1, p2):
    """Exhaustive CRT check: every (r, b, r', b', drift) meets within p1*p2 slots on deterministic indices."""
    n1, n2 = len(set1), len(set2)
    horizon = p1 * p2
    t = np.arange(horizon)
    worst = 0
    for r1 in range(1, p1):
        for b1 in range(p1):
            k1 = (r1 * t + b1) % p1
            for r2 in range(1, p2):
                for b2 in range(p2):
                    for drift in range(horizon):
                        k2 = (r2 * (t + drift) + b2) % p2
                        # random-branch slots count as misses: the guarantee cannot rely on them
                        ok = (k1 < n1) & (k2 < n2)
                        same = np.zeros(horizon, dtype=bool)
                        same[ok] = set1[k1[ok]] == set2[k2[ok]]
                        assert same.any(), (r1, b1, r2, b2, drift)
                        worst = max(worst, int(np.argmax(same)) + 1)
    return worst


def test_crt_rendezvous_exhaustive_p5_p7():
    set1 = np.array([0, 1, 2, 3])
    set2 = np.array([3, 4, 5, 6])
    assert _crt_hits(set1, set2, 5, 7) <= 35


# --- quasi-random state ----------------------------------------------------------

FIG1_SET1 = ChannelSet.of(range(7), 15)
FIG1_SET2 = ChannelSet.of(range(6, 11), 15)


def test_fig1_state_layout():
    st1 = QrUserState.create(FIG1_SET1, 11, id_channel=1)
    assert str(st1.codeword) == "20000101001"
    assert (st1.p0, st1.p1) == (7, 11)
    st2 = QrUserState.create(FIG1_SET2, 12, id_channel=6)
    assert str(st2.codeword) == "20000101110"
    assert (st2.p0, st2.p1) == (5, 7)
    for s in range(1, 11):
        assert 1 <= st1.r0[s] <= 6 and 0 <= st1.b0[s] <= 6
        assert 1 <= st1.r1[s] <= 10 and 0 <= st1.b1[s] <= 10


@pytest.mark.parametrize("seed", range(5))
def test_fig1_id_slots(seed):
    st1 = QrUserState.create(FIG1_SET1, seed, id_channel=1)
    assert [qr_next(st1, t) for t in (0, 11, 22)] == [1, 1, 1]


def test_qr_next_random_branch_when_clock_overflows():
    w = make_codeword(1, 4)  # w(5) = 1
    M = w.M
    zeros = np.zeros(M, dtype=np.int64)
    r1 = zeros.copy()
    b1 = zeros.copy()
    r1[5], b1[5] = 1, 10
    seen = set()
    for seed in range(200):
        state = QrUserState(FIG1_SET1, 1, w, 7, 11, zeros + 1, zeros, r1 + (r1 == 0), b1,
                            np.random.default_rng(seed))
        seen.add(qr_next(state, 5))
    assert seen == set(range(7))


def test_qr_next_deterministic_slot_follows_clock():
    w = make_codeword(1, 4)
    M = w.M
    ones = np.ones(M, dtype=np.int64)
    b1 = np.zeros(M, dtype=np.int64)
    b1[5] = 3
    state = QrUserState(FIG1_SET1, 1, w, 7, 11, ones, ones * 0, ones * 2, b1, np.random.default_rng(0))
    # position 5 is a 1-trit: k = (2*q + 3) mod 11 with q = 0, 1, 2 -> 3, 5, 7(overflow)
    assert qr_next(state, 5) == 3
    assert qr_next(state, 5 + M) == 5


def test_qr_state_rejects_foreign_id():
    with pytest.raises(ValueError):
        QrUserState.create(FIG1_SET2, 0, id_channel=1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(2, 300), st.data())
def test_block_matches_stepwise_generation(seed, N, data):
    n = data.draw(st.integers(1, min(N, 40)))
    labels = sorted(data.draw(st.lists(st.integers(0, N - 1), min_size=n, max_size=n, unique=True)))
    chans = ChannelSet(tuple(labels), N)
    start = data.draw(st.integers(0, 500))
    a = QrUserState.create(chans, seed)
    b = QrUserState.create(chans, seed)
    stepwise = [qr_next(a, t) for t in range(start, start + 3 * a.M)]
    block = b.block(start, 3 * b.M)[0].tolist()
    assert stepwise == block


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(2, 64), st.integers(1, 20))
def test_membership_and_periodic_id(seed, N, n):
    n = min(n, N)
    chans = ChannelSet.of(range(N - n, N), N)
    state = QrUserState.create(chans, seed)
    horizon = 9 * state.M * n * n
    seq = state.block(0, horizon)[0]
    assert set(seq.tolist()) <= set(chans)
    assert (seq[::state.M] == state.id_channel).all()


def test_same_seed_same_sequence():
    chans = ChannelSet.of([1, 4, 9, 12, 30], 40)
    a = QrUserState.create(chans, 2024)
    b = QrUserState.create(chans, 2024)
    c = QrUserState.create(chans, 2025)
    assert (a.block(0, 2000) == b.block(0, 2000)).all()
    assert not (QrUserState.create(chans, 2024).block(0, 2000) == c.block(0, 2000)).all()


def test_seed_must_be_64_bit():
    with pytest.raises(ValueError):
        QrUserState.create(FIG1_SET1, 2**64)
    with pytest.raises(ValueError):
        QrUserState.create(FIG1_SET1, -1)


# --- random baseline -------------------------------------------------------------

def test_random_step_examples():
    rng = np.random.default_rng(3)
    assert random_step(ChannelSet.of([4], 8), 1, rng) == {4}
    assert random_step(ChannelSet.of(range(7), 8), 7, rng) == set(range(7))
    with pytest.raises(ValueError):
        random_step(ChannelSet.of(range(3), 8), 4, rng)


def test_random_step_pairs_are_uniform():
    chans = ChannelSet.of(range(10), 10)
    rng = np.random.default_rng(5)
    index = {frozenset(p): i for i, p in enumerate(combinations(range(10), 2))}
    counts = np.zeros(45)
    for _ in range(45_000):
        counts[index[random_step(chans, 2, rng)]] += 1
    assert stats.chisquare(counts).pvalue > 1e-3


def test_random_user_block_pairs_are_uniform():
    user = RandomUser(ChannelSet.of(range(10), 10), 2, 9)
    x = user.block(0, 45_000)
    assert (x[0] != x[1]).all()
    index = {frozenset(p): i for i, p in enumerate(combinations(range(10), 2))}
    counts = np.zeros(45)
    for a, b in x.T:
        counts[index[frozenset((int(a), int(b)))]] += 1
    assert stats.chisquare(counts).pvalue > 1e-3


# --- multi-radio -------------------------------------------------------------------

def test_partition_examples():
    assert [c.channels for c in partition_round_robin(ChannelSet.of(range(7), 8), 1)] == [tuple(range(7))]
    assert [c.channels for c in partition_round_robin(ChannelSet.of(range(5), 8), 2)] == [(0, 2, 4), (1, 3)]
    cells = partition_round_robin(ChannelSet.of(range(40), 160), 4)
    assert [c.n for c in cells] == [10, 10, 10, 10]
    with pytest.raises(ValueError):
        partition_round_robin(ChannelSet.of(range(3), 8), 4)
    with pytest.raises(ValueError):
        partition_round_robin(ChannelSet.of(range(3), 8), 0)


@given(st.lists(st.integers(0, 199), min_size=1, max_size=80, unique=True), st.integers(1, 80))
def test_partition_invariants(labels, m):
    chans = ChannelSet.of(labels, 200)
    m = min(m, chans.n)
    cells = partition_round_robin(chans, m)
    flat = [c for cell in cells for c in cell]
    assert sorted(flat) == list(chans)
    assert len(flat) == len(set(flat))
    sizes = [c.n for c in cells]
    assert max(sizes) <= -(-chans.n // m)
    assert max(sizes) - min(sizes) <= 1


def test_multi_radio_single_radio_degenerates():
    chans = ChannelSet.of(range(7), 15)
    user = MultiRadioUser.create(chans, 1, 77)
    ref = QrUserState.create(chans, np.random.SeedSequence(77).spawn(1)[0])
    assert [multi_radio_next(user.radios, t) for t in range(50)] == [{qr_next(ref, t)} for t in range(50)]


def test_multi_radio_id_slots_and_distinct_cells():
    chans = ChannelSet.of(range(0, 160, 4), 160)  # n = 40
    user = MultiRadioUser.create(chans, 4, 11)
    cells = [set(r.channels) for r in user.radios]
    x = user.block(0, 5000)
    for k in range(4):
        assert set(x[k].tolist()) <= cells[k]
    assert (x[:, ::user.M] == np.array([[r.id_channel] for r in user.radios])).all()
    assert all(len(set(col)) == 4 for col in x.T.tolist())
    assert multi_radio_next(user.radios, 0) == {r.id_channel for r in user.radios}


def test_multi_radio_rejects_mixed_networks():
    a = QrUserState.create(ChannelSet.of(range(3), 15), 1)
    b = QrUserState.create(ChannelSet.of(range(3), 160), 1)
    with pytest.raises(ValueError):
        MultiRadioUser([a, b])
