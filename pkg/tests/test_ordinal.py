import random

import pytest
from hypothesis import given, settings, strategies as st

from ittm.ordinal import (
    OMEGA, ONE, ZERO, Ordinal, OrdinalParseError, add, compare, mul, nat,
    next_limit, omega_power, parse_ordinal,
)


# ---------------------------------------------------------------------------
# Independent oracle: an ordinal below w^K as a list of "blocks", each block
# a single power w^i.  Sum = concatenation followed by right-to-left
# absorption (a block absorbs everything smaller before it), which is the
# sup/order-type argument done literally on small linear orders.

def blocks(o):
    out = []
    for e, c in o.terms:
        out.extend([e.as_int()] * c)
    return out


def absorb(blks):
    out = []
    for b in reversed(blks):
        if not out or b >= out[-1]:
            out.append(b)
    return list(reversed(out))


def of_blocks(blks):
    o = ZERO
    for b in blks:
        o = o + omega_power(b)
    return o


def oracle_add(a, b):
    return of_blocks(absorb(blocks(a) + blocks(b)))


def oracle_mul(a, b):
    # a * w^j = w^(lead(a)+j) for j >= 1; a * 1 = a; then sum over b's blocks.
    if a.is_zero() or b.is_zero():
        return ZERO
    lead = a.terms[0][0].as_int()
    parts = []
    for j in blocks(b):
        parts.append([lead + j] if j >= 1 else blocks(a))
    return of_blocks(absorb([x for part in parts for x in part]))


def random_ordinal(rng, max_exp=4, max_coeff=3, max_terms=3):
    exps = sorted(rng.sample(range(max_exp + 1), rng.randint(0, max_terms)),
                  reverse=True)
    return Ordinal(tuple((nat(e), rng.randint(1, max_coeff)) for e in exps))


# ---------------------------------------------------------------------------


def test_parse_spec_examples():
    assert parse_ordinal("0") == ZERO
    a = parse_ordinal("w^2 + w*3 + 5")
    assert a.terms == ((nat(2), 1), (nat(1), 3), (nat(0), 5))
    with pytest.raises(OrdinalParseError):
        parse_ordinal("w + w")


def test_parse_rejects_non_canonical():
    for bad in ["w*1", "w^1", "w^0", "0+w", "w+w^2", "3+w", "5+3", "w*0",
                "", "w^", "1 2", "w^(w)", "w^(2)"]:
        with pytest.raises(OrdinalParseError):
            parse_ordinal(bad)


def test_print_parse_roundtrip_random():
    rng = random.Random(7)
    for _ in range(1000):
        o = random_ordinal(rng)
        assert parse_ordinal(str(o)) == o


def test_nested_exponents_roundtrip():
    o = omega_power(OMEGA + nat(1), 2) + omega_power(OMEGA) + omega_power(3) + ONE
    assert str(o) == "w^(w+1)*2+w^w+w^3+1"
    assert parse_ordinal(str(o)) == o


def test_compare_spec_examples():
    assert compare(OMEGA, OMEGA * 2) == "less"
    assert compare(omega_power(2), OMEGA * 999 + nat(7)) == "greater"
    assert compare(OMEGA + ONE, OMEGA + ONE) == "equal"


def test_add_spec_examples():
    assert ONE + OMEGA == OMEGA
    assert omega_power(2) + OMEGA == parse_ordinal("w^2+w")
    # (w+3) + w = w*2, frozen from the block-absorption oracle
    assert oracle_add(OMEGA + nat(3), OMEGA) == OMEGA * 2
    assert (OMEGA + nat(3)) + OMEGA == OMEGA * 2


def test_mul_spec_examples():
    assert nat(2) * OMEGA == OMEGA
    assert oracle_mul(OMEGA * 2, OMEGA) == omega_power(2)
    assert (OMEGA * 2) * OMEGA == omega_power(2)
    assert parse_ordinal("w^2+w*3") * ZERO == ZERO


def test_add_mul_agree_with_block_oracle():
    rng = random.Random(21)
    for _ in range(400):
        a, b = random_ordinal(rng), random_ordinal(rng)
        assert a + b == oracle_add(a, b), (a, b)
        assert a * b == oracle_mul(a, b), (a, b)


def test_next_limit_spec_examples():
    assert next_limit(ZERO) == OMEGA
    assert next_limit(OMEGA + nat(5)) == OMEGA * 2
    assert next_limit(omega_power(2)) == omega_power(2) + OMEGA


def test_next_limit_is_least_limit_above():
    # Enumerate all ordinals below w^3 with coefficients <= 4 and check
    # next_limit against compare directly.
    small = []
    for a in range(5):
        for b in range(5):
            for c in range(5):
                small.append(omega_power(2, a) + OMEGA * b + nat(c))
    small.sort()
    limits = [o for o in small if o.is_limit()]
    for o in small:
        nl = next_limit(o)
        assert nl.is_limit() and nl > o
        for lam in limits:
            assert not (o < lam < nl)


ordinals = st.builds(
    lambda pairs: of_blocks(sorted([e for e, c in pairs for _ in range(c)],
                                   reverse=True)),
    st.lists(st.tuples(st.integers(0, 5), st.integers(1, 4)), max_size=4),
)


@settings(max_examples=300, deadline=None)
@given(ordinals, ordinals, ordinals)
def test_algebraic_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert ZERO + a == a + ZERO == a
    assert ONE * a == a * ONE == a


@settings(max_examples=300, deadline=None)
@given(ordinals, ordinals, ordinals)
def test_right_monotonicity(a, b, c):
    if b < c:
        assert a + b < a + c


@settings(max_examples=200, deadline=None)
@given(ordinals, ordinals)
def test_total_order(a, b):
    assert (a < b) + (a == b) + (a > b) == 1


def test_immutable_and_hashable():
    a = parse_ordinal("w^2+1")
    with pytest.raises(AttributeError):
        a.terms = ()
    assert len({a, parse_ordinal("w^2+1"), OMEGA}) == 2


def test_successor_predecessor():
    a = parse_ordinal("w^2+3")
    assert a.is_successor() and a.predecessor() == parse_ordinal("w^2+2")
    assert (OMEGA + ONE).predecessor() == OMEGA
    assert OMEGA.is_limit() and not OMEGA.is_successor()
    with pytest.raises(ValueError):
        OMEGA.predecessor()
