"""Ordinals below epsilon_0 in Cantor normal form.

An ordinal is a finite sum  w^e1*c1 + w^e2*c2 + ... + w^ek*ck  with the
exponents (themselves ordinals) strictly decreasing and every coefficient
a positive integer.  The empty sum is 0, and a natural number n is the
single term w^0*n.  Values are immutable and hashable; all operations are
pure, so ordinals can be shared freely.

Notation (ASCII, bit-exact):

    ord  := "0" | term ("+" term)*
    term := "w" ("^" exp)? ("*" nat)? | nat
    exp  := nat | "w" | "(" ord ")"

Whitespace is insignificant.  The printer emits the unique canonical
spelling: "^" is omitted for exponent 1, "*1" is omitted, and exponents
that are not a bare natural or a bare "w" are parenthesised.  The parser
rejects non-canonical spellings ("w + w" must be written "w*2").
"""

from __future__ import annotations

from functools import total_ordering


class OrdinalParseError(ValueError):
    """Raised for malformed or non-canonical ordinal notation."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@total_ordering
class Ordinal:
    """An ordinal below epsilon_0, kept in Cantor normal form."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        terms = tuple((e, int(c)) for (e, c) in terms)
        for e, c in terms:
            if not isinstance(e, Ordinal):
                raise TypeError("exponents must be Ordinal values")
            if c < 1:
                raise ValueError("coefficients must be >= 1")
        for (e1, _), (e2, _) in zip(terms, terms[1:]):
            if not e1._gt(e2):
                raise ValueError("exponents must be strictly decreasing")
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, name, value):
        raise AttributeError("Ordinal is immutable")

    # -- basic predicates ------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_finite(self):
        """True for 0 and all naturals."""
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0].is_zero())

    def is_limit(self):
        """True iff nonzero with no finite part (no exponent-0 term)."""
        return bool(self.terms) and not self.terms[-1][0].is_zero()

    def is_successor(self):
        return bool(self.terms) and self.terms[-1][0].is_zero()

    def as_int(self):
        """The value as a Python int; only defined for finite ordinals."""
        if not self.terms:
            return 0
        if not self.is_finite():
            raise ValueError(f"{self} is not finite")
        return self.terms[0][1]

    def limit_part(self):
        """Largest limit-or-zero ordinal <= self (self with finite part dropped)."""
        if self.is_successor():
            return Ordinal(self.terms[:-1])
        return self

    def finite_part(self):
        """The n with self = limit_part() + n."""
        if self.is_successor():
            return self.terms[-1][1]
        return 0

    def predecessor(self):
        """The beta with beta + 1 = self; only defined for successors."""
        if not self.is_successor():
            raise ValueError(f"{self} is not a successor ordinal")
        exp, c = self.terms[-1]
        if c == 1:
            return Ordinal(self.terms[:-1])
        return Ordinal(self.terms[:-1] + ((exp, c - 1),))

    # -- order -----------------------------------------------------------

    def _cmp(self, other):
        for (e1, c1), (e2, c2) in zip(self.terms, other.terms):
            k = e1._cmp(e2)
            if k:
                return k
            if c1 != c2:
                return -1 if c1 < c2 else 1
        if len(self.terms) != len(other.terms):
            return -1 if len(self.terms) < len(other.terms) else 1
        return 0

    def _gt(self, other):
        return self._cmp(other) > 0

    def __eq__(self, other):
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __lt__(self, other):
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self._cmp(other) < 0

    def __hash__(self):
        return hash(self.terms)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = nat(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        if not other.terms:
            return self
        lead = other.terms[0][0]
        keep = [t for t in self.terms if t[0]._gt(lead)]
        merged = list(other.terms)
        k = len(keep)
        if k < len(self.terms) and self.terms[k][0] == lead:
            merged[0] = (lead, self.terms[k][1] + other.terms[0][1])
        return Ordinal(tuple(keep) + tuple(merged))

    def __mul__(self, other):
        if isinstance(other, int):
            other = nat(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        if not self.terms or not other.terms:
            return ZERO
        e1, c1 = self.terms[0]
        out = ZERO
        for f, d in other.terms:
            if f.is_zero():
                # self * d: the finite factor scales the leading coefficient
                out = out + Ordinal(((e1, c1 * d),) + self.terms[1:])
            else:
                out = out + Ordinal(((e1 + f, d),))
        return out

    def next_limit(self):
        """Least limit ordinal strictly greater than self."""
        return self.limit_part() + OMEGA

    def minus(self, base):
        """The unique d with base + d = self; requires base <= self."""
        k = base._cmp(self)
        if k > 0:
            raise ValueError(f"cannot subtract {base} from {self}")
        if k == 0:
            return ZERO
        i = 0
        while i < len(base.terms) and base.terms[i] == self.terms[i]:
            i += 1
        # self is strictly larger, so it has a term at i dominating the rest
        # of base; if exponents tie the difference keeps the coefficient gap.
        e, c = self.terms[i]
        if i < len(base.terms) and base.terms[i][0] == e:
            # same exponent: base <= self forces a strictly smaller coefficient
            gap = c - base.terms[i][1]
            assert gap > 0
            return Ordinal(((e, gap),) + self.terms[i + 1:])
        return Ordinal(self.terms[i:])

    # -- notation ----------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e.is_zero():
                parts.append(str(c))
                continue
            if e == ONE:
                s = "w"
            elif e.is_finite() or e == OMEGA:
                s = f"w^{e}"
            else:
                s = f"w^({e})"
            if c != 1:
                s += f"*{c}"
            parts.append(s)
        return "+".join(parts)

    def __repr__(self):
        return f"Ordinal[{self}]"


def nat(n):
    """The finite ordinal n."""
    if n < 0:
        raise ValueError("ordinals are non-negative")
    if n == 0:
        return ZERO
    return Ordinal(((ZERO, n),))


def omega_power(e, coeff=1):
    """w^e * coeff as an Ordinal; e may be an int or an Ordinal."""
    if isinstance(e, int):
        e = nat(e)
    if coeff == 0:
        return ZERO
    return Ordinal(((e, coeff),))


ZERO = Ordinal()
ONE = nat(1)
OMEGA = omega_power(1)


def compare(a, b):
    """Three-way comparison: 'less', 'equal' or 'greater'."""
    k = a._cmp(b)
    return "less" if k < 0 else ("greater" if k > 0 else "equal")


def add(a, b):
    return a + b


def mul(a, b):
    return a * b


def next_limit(a):
    return a.next_limit()


# -- parser ----------------------------------------------------------------


class _Scanner:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch):
        if self.peek() != ch:
            raise OrdinalParseError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def nat(self):
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise OrdinalParseError("expected a number", start)
        lit = self.text[start:self.pos]
        if len(lit) > 1 and lit[0] == "0":
            raise OrdinalParseError("leading zero in number", start)
        return int(lit)


def parse_ordinal(text):
    """Parse canonical ordinal notation; raises OrdinalParseError otherwise."""
    sc = _Scanner(text)
    value = _parse_ord(sc)
    sc.skip_ws()
    if sc.pos != len(text):
        raise OrdinalParseError("trailing input", sc.pos)
    return value


def _parse_ord(sc):
    if sc.peek() == "0":
        mark = sc.pos
        sc.take("0")
        # A bare zero must stand alone within its ord.
        if sc.peek().isdigit():
            raise OrdinalParseError("leading zero in number", mark)
        if sc.peek() == "+":
            raise OrdinalParseError("zero cannot appear in a sum", mark)
        return ZERO
    terms = [_parse_term(sc)]
    while sc.peek() == "+":
        sc.take("+")
        terms.append(_parse_term(sc))
    for (e1, _), (e2, _), in zip(terms, terms[1:]):
        if not e1._gt(e2):
            raise OrdinalParseError(
                f"non-canonical term order (w^{e1} before w^{e2})", sc.pos)
    return Ordinal(terms)


def _parse_term(sc):
    if sc.peek() == "w":
        sc.take("w")
        exp = ONE
        if sc.peek() == "^":
            sc.take("^")
            exp = _parse_exponent(sc)
        coeff = 1
        if sc.peek() == "*":
            mark = sc.pos
            sc.take("*")
            coeff = sc.nat()
            if coeff == 0:
                raise OrdinalParseError("zero coefficient", mark)
            if coeff == 1:
                raise OrdinalParseError("non-canonical coefficient *1", mark)
        return (exp, coeff)
    mark = sc.pos
    n = sc.nat()
    if n == 0:
        raise OrdinalParseError("zero cannot appear as a term", mark)
    return (ZERO, n)


def _parse_exponent(sc):
    ch = sc.peek()
    if ch == "(":
        sc.take("(")
        e = _parse_ord(sc)
        sc.take(")")
        if e.is_finite() or e == OMEGA:
            raise OrdinalParseError("non-canonical parenthesised exponent", sc.pos)
        return e
    if ch == "w":
        sc.take("w")
        return OMEGA
    mark = sc.pos
    n = sc.nat()
    if n == 0:
        raise OrdinalParseError("non-canonical exponent ^0", mark)
    if n == 1:
        raise OrdinalParseError("non-canonical exponent ^1", mark)
    return nat(n)
