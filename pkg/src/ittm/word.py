"""Eventually periodic infinite binary sequences.

A Word is a finite prefix followed by a forever-repeated nonempty period;
an all-zero period encodes a finitely supported sequence.  Construction
canonicalises: the period is reduced to its minimal length, then the
prefix to its minimal length, so two Words denote the same infinite
sequence exactly when they are equal.  Words are immutable.

Serialization is ``prefixBits|periodBits`` (e.g. ``101|0``, ``|10``); the
period part must be nonempty.
"""

from __future__ import annotations

from math import lcm


class WordParseError(ValueError):
    pass


def _min_period(period: bytes) -> bytes:
    # Minimal period of the purely periodic sequence period^w divides
    # len(period) (Fine and Wilf).
    n = len(period)
    for d in range(1, n + 1):
        if n % d == 0 and period[:d] * (n // d) == period:
            return period[:d]
    raise AssertionError("unreachable")


class Word:
    """An eventually periodic element of 2^omega."""

    __slots__ = ("prefix", "period")

    def __init__(self, prefix=b"", period=b"\x00"):
        prefix = bytes(prefix)
        period = bytes(period)
        if not period:
            raise ValueError("period must be nonempty")
        if any(b not in (0, 1) for b in prefix) or any(b not in (0, 1) for b in period):
            raise ValueError("bits must be 0 or 1")
        period = _min_period(period)
        # Shrink the prefix: a prefix ending in the bit the rotated period
        # would supply is redundant.
        pre = bytearray(prefix)
        off = 0  # period read as period[off:] + period[:off]
        p = len(period)
        while pre and pre[-1] == period[(off - 1) % p]:
            pre.pop()
            off = (off - 1) % p
        period = period[off:] + period[:off]
        object.__setattr__(self, "prefix", bytes(pre))
        object.__setattr__(self, "period", _min_period(period))

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    # -- access ------------------------------------------------------------

    def read(self, i):
        """The i-th bit (i >= 0)."""
        if i < 0:
            raise IndexError("cell index must be >= 0")
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def expand(self, n):
        """The first n bits as bytes."""
        if n <= len(self.prefix):
            return self.prefix[:n]
        tail = n - len(self.prefix)
        reps = tail // len(self.period) + 1
        return self.prefix + (self.period * reps)[:tail]

    def write(self, i, b):
        """A Word equal to self except bit i is b."""
        if b not in (0, 1):
            raise ValueError("bit must be 0 or 1")
        if self.read(i) == b:
            return self
        n = max(i + 1, len(self.prefix))
        pre = bytearray(self.expand(n))
        pre[i] = b
        k = (n - len(self.prefix)) % len(self.period)
        return Word(bytes(pre), self.period[k:] + self.period[:k])

    def drop(self, n):
        """The Word starting at position n (self shifted left by n)."""
        if n <= len(self.prefix):
            return Word(self.prefix[n:], self.period)
        k = (n - len(self.prefix)) % len(self.period)
        return Word(b"", self.period[k:] + self.period[:k])

    # -- predicates ----------------------------------------------------------

    def is_zero(self):
        return not self.prefix and self.period == b"\x00"

    def is_finitely_supported(self):
        return self.period == b"\x00"

    def support_bound(self):
        """Least n with all bits >= n zero; None if not finitely supported."""
        if not self.is_finitely_supported():
            return None
        return len(self.prefix)

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.prefix == other.prefix and self.period == other.period

    def __hash__(self):
        return hash((self.prefix, self.period))

    # -- notation --------------------------------------------------------------

    def __str__(self):
        bits = lambda bs: "".join(str(b) for b in bs)
        return f"{bits(self.prefix)}|{bits(self.period)}"

    def __repr__(self):
        return f"Word[{self}]"


ZERO_WORD = Word()
ONES_WORD = Word(b"", b"\x01")


def word(text):
    """Build a Word from notation like '101|0' (alias of parse_word)."""
    return parse_word(text)


def parse_word(text):
    if text.count("|") != 1:
        raise WordParseError(f"word literal needs exactly one '|': {text!r}")
    pre, per = text.split("|")
    if not per:
        raise WordParseError("empty period is forbidden")
    try:
        prefix = bytes(int(c) for c in pre)
        period = bytes(int(c) for c in per)
    except ValueError:
        raise WordParseError(f"bits must be 0 or 1: {text!r}") from None
    if any(b not in (0, 1) for b in prefix + period):
        raise WordParseError(f"bits must be 0 or 1: {text!r}")
    return Word(prefix, period)


def from_bits(bits):
    """Finitely supported Word with the given initial bits."""
    return Word(bytes(bits), b"\x00")


def common_window(ws):
    """A window length on which cellwise facts about ws decide the tails.

    Beyond max prefix length every word repeats with the lcm of the
    periods, so any cellwise property checked on prefix+lcm cells holds
    everywhere.
    """
    pre = max((len(w.prefix) for w in ws), default=0)
    per = lcm(*(len(w.period) for w in ws)) if ws else 1
    return pre, per


def pointwise_or(ws):
    """Cellwise maximum of a nonempty list of Words."""
    ws = list(ws)
    if not ws:
        raise ValueError("pointwise_or needs a nonempty list")
    pre, per = common_window(ws)
    rows = [w.expand(pre + per) for w in ws]
    out = bytearray(pre + per)
    for row in rows:
        for i, b in enumerate(row):
            if b:
                out[i] = 1
    return Word(bytes(out[:pre]), bytes(out[pre:]))


def pointwise_and(ws):
    ws = list(ws)
    if not ws:
        raise ValueError("pointwise_and needs a nonempty list")
    pre, per = common_window(ws)
    out = bytearray([1]) * (pre + per)
    for w in ws:
        for i, b in enumerate(w.expand(pre + per)):
            if not b:
                out[i] = 0
    return Word(bytes(out[:pre]), bytes(out[pre:]))


def zeros_preserved(reference, others):
    """True iff every cell that is 0 in reference is 0 in all of others."""
    others = list(others)
    if not others:
        return True
    combined = pointwise_or(others)
    pre, per = common_window([reference, combined])
    n = pre + per
    ref = reference.expand(n)
    got = combined.expand(n)
    return all(r == 1 or g == 0 for r, g in zip(ref, got))


def canonical_eq(a, b):
    """True iff a and b denote the same infinite sequence."""
    return a == b
