import random
from math import lcm

import pytest
from hypothesis import given, settings, strategies as st

from ittm.word import (
    Word, WordParseError, ZERO_WORD, canonical_eq, from_bits, parse_word,
    pointwise_or, zeros_preserved,
)


def naive_bits(prefix, period, n):
    """Independent expansion of (prefix, period) without canonicalisation."""
    out = list(prefix)
    i = 0
    while len(out) < n:
        out.append(period[i % len(period)])
        i += 1
    return out[:n]


words = st.builds(
    lambda p, q: Word(bytes(p), bytes(q)),
    st.lists(st.integers(0, 1), max_size=6),
    st.lists(st.integers(0, 1), min_size=1, max_size=4),
)


def test_read_spec_examples():
    assert parse_word("101|0").read(1) == 0
    # 0-indexed, period repeated in written order: |10 reads 1,0,1,0,...
    assert parse_word("|10").read(7) == naive_bits([], [1, 0], 8)[7] == 0
    assert parse_word("|01").read(7) == 1
    # and the naive-expansion oracle decides this one
    w = parse_word("1|01")
    assert w.read(100) == naive_bits([1], [0, 1], 101)[100] == 1


def test_write_spec_examples():
    assert ZERO_WORD.write(0, 1) == parse_word("1|0")
    w = parse_word("1|01")
    assert w.write(5, w.read(5)) is w
    # write((e,1), 3, 0) -> prefix 1110 then ones; frozen via naive expansion
    got = parse_word("|1").write(3, 0)
    assert [got.read(i) for i in range(8)] == [1, 1, 1, 0, 1, 1, 1, 1]
    assert got == parse_word("1110|1")


def test_or_spec_examples():
    w = parse_word("1101|10")
    assert pointwise_or([ZERO_WORD, w]) == w
    assert pointwise_or([parse_word("|10"), parse_word("|01")]) == parse_word("|1")
    a, b = parse_word("1|0"), parse_word("|001")
    got = pointwise_or([a, b])
    n = 64
    want = [max(a.read(i), b.read(i)) for i in range(n)]
    assert [got.read(i) for i in range(n)] == want


def test_zeros_preserved_spec_examples():
    w = parse_word("1101|10")
    assert zeros_preserved(w, [w])
    assert not zeros_preserved(ZERO_WORD, [parse_word("001|0")])
    assert zeros_preserved(parse_word("|1"), [parse_word("10|0"), parse_word("|01")])


def test_canonical_eq_spec_examples():
    a, b = parse_word("10|10"), parse_word("1|01")
    assert canonical_eq(a, b)
    assert [a.read(i) for i in range(16)] == [b.read(i) for i in range(16)]
    assert canonical_eq(parse_word("|0"), parse_word("0|00"))
    assert not canonical_eq(parse_word("1|0"), parse_word("0|0"))


def test_parse_errors():
    for bad in ["101", "1|", "|", "12|0", "1|2", "1|0|1"]:
        with pytest.raises(WordParseError):
            parse_word(bad)


def test_str_roundtrip():
    rng = random.Random(5)
    for _ in range(300):
        pre = bytes(rng.randint(0, 1) for _ in range(rng.randint(0, 6)))
        per = bytes(rng.randint(0, 1) for _ in range(rng.randint(1, 4)))
        w = Word(pre, per)
        assert parse_word(str(w)) == w


@settings(max_examples=300, deadline=None)
@given(words)
def test_canonicalisation_preserves_sequence(w):
    # Rebuilding from any expansion (with the right period phase) gives the
    # same canonical value.
    n = len(w.prefix) + 3 * len(w.period) + 5
    k = (n - len(w.prefix)) % len(w.period)
    chopped = Word(w.expand(n), w.period[k:] + w.period[:k])
    assert chopped == w


@settings(max_examples=300, deadline=None)
@given(words, st.integers(0, 40), st.integers(0, 1))
def test_read_write_laws(w, i, b):
    ww = w.write(i, b)
    assert ww.read(i) == b
    bound = 4 * (len(w.prefix) + len(w.period)) + i + 8
    for j in range(bound):
        if j != i:
            assert ww.read(j) == w.read(j)


@settings(max_examples=200, deadline=None)
@given(st.lists(words, min_size=1, max_size=4))
def test_or_matches_naive(ws):
    got = pointwise_or(ws)
    n = max(len(w.prefix) for w in ws) + lcm(*(len(w.period) for w in ws)) + 16
    for i in range(n):
        assert got.read(i) == max(w.read(i) for w in ws)


@settings(max_examples=200, deadline=None)
@given(words, words)
def test_finite_window_equality_is_sound(a, b):
    # canonical_eq iff agreement on the prefixes + lcm window, checked by a
    # much longer randomized expansion.
    n = max(len(a.prefix), len(b.prefix)) + lcm(len(a.period), len(b.period))
    window_eq = a.expand(n) == b.expand(n)
    long_eq = a.expand(8 * n + 64) == b.expand(8 * n + 64)
    assert window_eq == long_eq == canonical_eq(a, b)


def test_drop():
    w = parse_word("10110|01")
    for n in range(12):
        d = w.drop(n)
        assert [d.read(i) for i in range(10)] == [w.read(n + i) for i in range(10)]


def test_canonicalisation_idempotent():
    rng = random.Random(11)
    for _ in range(200):
        pre = bytes(rng.randint(0, 1) for _ in range(rng.randint(0, 5)))
        per = bytes(rng.randint(0, 1) for _ in range(rng.randint(1, 3)))
        w = Word(pre, per)
        assert Word(w.prefix, w.period) == w


def test_from_bits_and_support():
    w = from_bits([1, 0, 1])
    assert w.is_finitely_supported() and w.support_bound() == 3
    assert not parse_word("|01").is_finitely_supported()
    assert ZERO_WORD.support_bound() == 0
