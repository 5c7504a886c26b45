"""ITTM programs: transition tables, machine language, numbering, stepping.

A program has three tapes (input, scratch, output) or four when
relativised (plus the oracle tape), a single head that reads and writes
one cell on every tape at once, and distinguished start/limit/halt states
(plus an optional oracle-query state).  The transition table must be
total on every non-halt state and read pattern; the halt state has no
outgoing rows.

The successor step follows the usual mechanics; moving left at cell 0
leaves the head at cell 0.  In the query state the oracle's answer for
the current oracle-tape word replaces the oracle-tape cell under the
head before the row is applied.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .word import Word, ZERO_WORD, from_bits

MOVES = ("L", "R")


class MachineError(ValueError):
    pass


class ProgramParseError(MachineError):
    def __init__(self, message, line=None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line


@dataclass(frozen=True)
class Program:
    """A finite ITTM transition table."""

    name: str
    tapes: int                      # 3, or 4 when relativised
    states: tuple                   # all state ids, declaration order
    start: str
    limit: str
    halt: str
    query: str | None
    delta: dict                     # (state, reads) -> (writes, move, next)

    def __post_init__(self):
        if self.tapes not in (3, 4):
            raise MachineError("a program has 3 tapes, or 4 with an oracle tape")
        if self.query is not None and self.tapes != 4:
            raise MachineError("a query state requires the oracle tape")
        distinct = {self.start, self.limit, self.halt}
        if len(distinct) != 3 or self.query in distinct:
            raise MachineError("start, limit, halt (and query) must be distinct")
        for s in (self.start, self.limit, self.halt) + ((self.query,) if self.query else ()):
            if s not in self.states:
                raise MachineError(f"undeclared distinguished state {s!r}")
        self._check_table()

    def _check_table(self):
        patterns = [tuple(bits) for bits in _all_patterns(self.tapes)]
        for (state, reads), (writes, move, nxt) in self.delta.items():
            if state == self.halt:
                raise MachineError("halt state cannot have outgoing rows")
            if state not in self.states or nxt not in self.states:
                raise MachineError(f"row uses undeclared state: {state} -> {nxt}")
            if len(reads) != self.tapes or len(writes) != self.tapes:
                raise MachineError("row width does not match tape count")
            if move not in MOVES:
                raise MachineError(f"bad move {move!r}")
        for state in self.states:
            if state == self.halt:
                continue
            for pat in patterns:
                if (state, pat) not in self.delta:
                    raise MachineError(
                        f"table not total: state {state!r} lacks a row for "
                        f"pattern {''.join(map(str, pat))}")
        unreachable = self._unreachable()
        if unreachable:
            warnings.warn(f"unreachable states in {self.name!r}: {sorted(unreachable)}",
                          stacklevel=3)

    def _unreachable(self):
        seen = {self.start, self.limit, self.halt}
        if self.query:
            seen.add(self.query)
        frontier = [self.start, self.limit] + ([self.query] if self.query else [])
        while frontier:
            s = frontier.pop()
            for (state, _), (_, _, nxt) in self.delta.items():
                if state == s and nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return set(self.states) - seen

    def row(self, state, reads):
        return self.delta[(state, tuple(reads))]


@dataclass(frozen=True)
class Snapshot:
    """One machine configuration: state, head cell, tape contents."""

    state: str
    head: int
    tapes: tuple  # of Word, length 3 or 4

    def __post_init__(self):
        if self.head < 0:
            raise MachineError("head cannot be negative")

    def reads(self):
        return tuple(t.read(self.head) for t in self.tapes)


def _all_patterns(tapes):
    for v in range(1 << tapes):
        yield tuple((v >> (tapes - 1 - i)) & 1 for i in range(tapes))


def initial_snapshot(program, input_word, oracle_word=None):
    """The stage-0 configuration on the given input."""
    tapes = [input_word, ZERO_WORD, ZERO_WORD]
    if program.tapes == 4:
        tapes.append(oracle_word if oracle_word is not None else ZERO_WORD)
    elif oracle_word is not None:
        raise MachineError("oracle tape preload on a 3-tape program")
    return Snapshot(program.start, 0, tuple(tapes))


def step(program, snap, oracle=None):
    """One successor step.  oracle: pure Word -> {0,1} membership answerer."""
    if snap.state == program.halt:
        raise MachineError("cannot step a halted snapshot")
    tapes = snap.tapes
    if program.query is not None and snap.state == program.query:
        if oracle is None:
            raise MachineError("query state entered with no oracle attached")
        answer = 1 if oracle(tapes[3]) else 0
        tapes = tapes[:3] + (tapes[3].write(snap.head, answer),)
    reads = tuple(t.read(snap.head) for t in tapes)
    try:
        writes, move, nxt = program.delta[(snap.state, reads)]
    except KeyError:
        raise MachineError(
            f"no row for state {snap.state!r} pattern {''.join(map(str, reads))}")
    new_tapes = tuple(t.write(snap.head, w) for t, w in zip(tapes, writes))
    head = snap.head + 1 if move == "R" else max(0, snap.head - 1)
    return Snapshot(nxt, head, new_tapes)


# ---------------------------------------------------------------------------
# Machine language


def parse_program(text, name=None):
    """Parse machine-language source, expanding macro blocks."""
    headers = {}
    rows = []           # (lineno, state, reads, writes, move, next)
    macros = {}
    lines = text.splitlines()
    i = 0
    call_counter = [0]
    while i < len(lines):
        lineno = i + 1
        line = _strip(lines[i])
        i += 1
        if not line:
            continue
        if line.startswith("macro "):
            mname = line[len("macro "):].strip()
            if not mname or mname in macros:
                raise ProgramParseError(f"bad or duplicate macro name {mname!r}", lineno)
            body = []
            while True:
                if i >= len(lines):
                    raise ProgramParseError(f"macro {mname!r} missing 'end'", lineno)
                inner = _strip(lines[i])
                inner_no = i + 1
                i += 1
                if inner == "end":
                    break
                if inner:
                    body.append((inner_no, inner))
            macros[mname] = body
            continue
        key, sep, value = line.partition(":")
        if sep and " " not in key and "->" not in line:
            headers[key.strip()] = value.strip()
            continue
        rows.extend(_expand_line(lineno, line, macros, call_counter))

    for required in ("start", "limit", "halt"):
        if required not in headers:
            raise ProgramParseError(f"missing header {required!r}")
    query = headers.get("query")
    tapes = int(headers.get("tapes", "4" if query else "3"))
    if tapes not in (3, 4):
        raise ProgramParseError("tapes must be 3 or 4")
    if query and tapes != 4:
        raise ProgramParseError("query state requires tapes: 4")

    delta = {}
    states = []

    def note(state):
        if state not in states:
            states.append(state)

    for s in (headers["start"], headers["limit"], headers["halt"]):
        note(s)
    if query:
        note(query)
    parsed = []
    for lineno, state, reads, writes, move, nxt in rows:
        if len(reads) != tapes or len(writes) != tapes:
            raise ProgramParseError(
                f"row width {len(reads)} does not match {tapes} tapes", lineno)
        note(state)
        note(nxt)
        parsed.append((lineno, state, reads, writes, move, nxt))
    for lineno, state, reads, writes, move, nxt in parsed:
        for pat in _match_patterns(reads):
            key = (state, pat)
            if key in delta:
                raise ProgramParseError(
                    f"ambiguous rows: state {state!r} pattern "
                    f"{''.join(map(str, pat))} matched twice", lineno)
            concrete = tuple(p if w == "*" else w for p, w in zip(pat, writes))
            delta[key] = (concrete, move, nxt)

    return Program(
        name=headers.get("name", name or "anonymous"),
        tapes=tapes,
        states=tuple(states),
        start=headers["start"],
        limit=headers["limit"],
        halt=headers["halt"],
        query=query,
        delta=delta,
    )


def _strip(line):
    cut = line.find("#")
    if cut >= 0:
        line = line[:cut]
    return line.strip()


def _expand_line(lineno, line, macros, counter):
    if line.startswith("call "):
        rest = [p.strip() for p in line[len("call "):].split(",")]
        if len(rest) != 3:
            raise ProgramParseError("call needs: call <macro>, <entry>, <exit>", lineno)
        mname, entry, exit_ = rest
        if mname not in macros:
            raise ProgramParseError(f"undefined macro {mname!r}", lineno)
        counter[0] += 1
        tag = counter[0]
        out = []
        for body_no, body_line in macros[mname]:
            expanded = _expand_line(body_no, body_line, macros, counter)
            for (no, state, reads, writes, move, nxt) in expanded:
                out.append((no, _freshen(state, mname, tag, entry, exit_),
                            reads, writes, move,
                            _freshen(nxt, mname, tag, entry, exit_)))
        return out
    return [_parse_row(lineno, line)]


def _freshen(state, mname, tag, entry, exit_):
    if state == "IN":
        return entry
    if state == "OUT":
        return exit_
    return f"{mname}.{tag}.{state}"


def _parse_row(lineno, line):
    head, arrow, tail = line.partition("->")
    if not arrow:
        raise ProgramParseError(f"expected a row or header, got {line!r}", lineno)
    parts = head.split()
    if len(parts) != 2:
        raise ProgramParseError("row must start 'state READS ->'", lineno)
    state, reads = parts
    eff = [p.strip() for p in tail.split(",")]
    if len(eff) != 3:
        raise ProgramParseError("row must end '-> WRITES, move, state'", lineno)
    writes, move, nxt = eff
    if move not in MOVES:
        raise ProgramParseError(f"move must be L or R, got {move!r}", lineno)
    if not all(c in "01*" for c in reads) or not all(c in "01*" for c in writes):
        raise ProgramParseError("reads/writes must be over 0, 1, *", lineno)
    reads_t = tuple(c if c == "*" else int(c) for c in reads)
    writes_t = tuple(c if c == "*" else int(c) for c in writes)
    return (lineno, state, reads_t, writes_t, move, nxt)


def _match_patterns(reads):
    slots = [(0, 1) if c == "*" else (c,) for c in reads]
    def rec(i):
        if i == len(slots):
            yield ()
            return
        for rest in rec(i + 1):
            for v in slots[i]:
                yield (v,) + rest
    # enumerate with the leftmost tape as the most significant position
    out = sorted(rec(0))
    return out


def format_program(program):
    """Canonical flat source; parse(format(p)) has the same table as p."""
    lines = [f"name: {program.name}", f"tapes: {program.tapes}",
             f"start: {program.start}", f"limit: {program.limit}",
             f"halt: {program.halt}"]
    if program.query:
        lines.append(f"query: {program.query}")
    lines.append("")
    for state in program.states:
        if state == program.halt:
            continue
        for pat in _all_patterns(program.tapes):
            writes, move, nxt = program.delta[(state, pat)]
            lines.append(f"{state} {_bits(pat)} -> {_bits(writes)}, {move}, {nxt}")
    return "\n".join(lines) + "\n"


def _bits(t):
    return "".join(str(b) for b in t)


# ---------------------------------------------------------------------------
# Program numbering.
#
# A natural n names the bit string s with bin(n+1) = "1" + s.  Literal
# form:  [0][oracle][unary extra-state count][rows].  States are numbered
# 0=start, 1=limit, 2=halt, (3=query), then the rest; rows are listed for
# every non-halt state in index order and every read pattern in binary
# order, each row being writes + move + a fixed-width next-state index.
# Fixed-argument form: [1][pair-coded bits of a finite word k][packed
# program q], decoding to "spread the input, write k on the even cells,
# then run q".  Anything unparseable decodes to the immediate halter.


def nat_to_bits(n):
    if n < 0:
        raise ValueError("program numbers are naturals")
    return bin(n + 1)[3:]


def bits_to_nat(bits):
    return int("1" + bits, 2) - 1


def halter_program():
    """The canonical immediately-halting program."""
    delta = {}
    for state in ("S", "L"):
        for pat in _all_patterns(3):
            delta[(state, pat)] = (pat, "R", "H")
    return Program("halter", 3, ("S", "L", "H"), "S", "L", "H", None, delta)


HALTER = halter_program()


def _canonical_state_order(program):
    order = [program.start, program.limit, program.halt]
    if program.query:
        order.append(program.query)
    frontier = [s for s in order if s != program.halt]
    seen = set(order)
    for s in frontier:
        for pat in _all_patterns(program.tapes):
            nxt = program.delta[(s, pat)][2]
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
                frontier.append(nxt)
    for s in program.states:      # unreachable states, declaration order
        if s not in seen:
            seen.add(s)
            order.append(s)
    return order


def encode(program):
    """Pack a program into its (literal-form) natural number."""
    order = _canonical_state_order(program)
    index = {s: i for i, s in enumerate(order)}
    S = len(order)
    width = max(1, (S - 1).bit_length())
    base = 4 if program.query else 3
    extra = S - base
    assert extra >= 0
    bits = ["0", "1" if program.query else "0", "1" * extra + "0"]
    for s in order:
        if s == program.halt:
            continue
        for pat in _all_patterns(program.tapes):
            writes, move, nxt = program.delta[(s, pat)]
            bits.append(_bits(writes))
            bits.append("1" if move == "R" else "0")
            bits.append(format(index[nxt], "b").zfill(width))
    return bits_to_nat("".join(bits))


def decode(n):
    """Total: every natural names a program; junk names the halter."""
    try:
        return _decode_bits(nat_to_bits(n))
    except (MachineError, ValueError, IndexError):
        return HALTER


def _decode_bits(bits):
    if not bits:
        raise ValueError("empty packing")
    if bits[0] == "1":
        k_bits, rest = _take_paircode(bits[1:])
        inner = _decode_bits(rest)
        return fixed_argument_program(inner, from_bits(k_bits))
    pos = 1
    oracle = bits[pos] == "1"
    pos += 1
    extra = 0
    while pos < len(bits) and bits[pos] == "1":
        extra += 1
        pos += 1
    if pos >= len(bits):
        raise ValueError("truncated state count")
    pos += 1  # the closing 0
    base = 4 if oracle else 3
    S = base + extra
    tapes = 4 if oracle else 3
    width = max(1, (S - 1).bit_length())
    names = _canonical_names(S, oracle)
    row_len = tapes + 1 + width
    rows_needed = (S - 1) * (1 << tapes)
    if len(bits) - pos != rows_needed * row_len:
        raise ValueError("packing length mismatch")
    delta = {}
    for s in names:
        if s == "H":
            continue
        for pat in _all_patterns(tapes):
            chunk = bits[pos:pos + row_len]
            pos += row_len
            writes = tuple(int(c) for c in chunk[:tapes])
            move = "R" if chunk[tapes] == "1" else "L"
            nxt = int(chunk[tapes + 1:], 2)
            if nxt >= S:
                raise ValueError("next-state index out of range")
            delta[(s, pat)] = (writes, move, names[nxt])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return Program("decoded", tapes, tuple(names), "S", "L", "H",
                       "Q" if oracle else None, delta)


def _canonical_names(S, oracle):
    base = ["S", "L", "H"] + (["Q"] if oracle else [])
    return base + [f"s{i}" for i in range(S - len(base))]


def _take_paircode(bits):
    """Split pair-coded bits [1b 1b ... 00] from the remainder."""
    out = []
    pos = 0
    while True:
        if pos + 2 > len(bits):
            raise ValueError("unterminated pair code")
        a, b = bits[pos], bits[pos + 1]
        pos += 2
        if a == "0":
            if b != "0":
                raise ValueError("bad pair code")
            return out, bits[pos:]
        out.append(int(b))


def paircode_bits(payload_bits):
    out = []
    for b in payload_bits:
        out.append("1")
        out.append(str(int(b)))
    out.append("00")
    return "".join(out)


def pack_fixed_arg(n, k):
    """The number of the fixed-argument form: run decode(n) on <k, x>."""
    if not k.is_finitely_supported():
        raise MachineError("fixed arguments must be finitely supported words")
    payload = [k.read(i) for i in range(k.support_bound())]
    return bits_to_nat("1" + paircode_bits(payload) + nat_to_bits(n))



def fixed_argument_program(q, k):
    """A program computing x |-> q(<k, x>); see argfix for the construction."""
    from . import argfix
    return argfix.fixed_argument_program(q, k)
