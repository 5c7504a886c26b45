"""Clock synthesis: a program halting in exactly alpha paper-steps for
any 0 < alpha < w^3 given in Cantor normal form.

The generated machine is a nest of limit-flag counters shaped by the
CNF alpha = w^2*a + w*b + c:

  * inside a w^2 stretch, every plain limit flashes the done-flag on
    scratch cell 0 on and then off again, so by the limsup rule the
    flag reads 1 exactly at the compound limits;
  * each recognised compound limit is tallied with a stable mark on the
    scratch tape by a short state-indexed walk (its cost is absorbed by
    the following limit);
  * the w phase tallies plain limits the same way;
  * the tally walk one round before the closing limit arms the "final
    lap" bit on output cell 0, so the closing limit can act the moment
    it happens (the deciding flags must sit on the very first cells);
  * the closing limit halts on the spot (c = 0), re-enters the limit
    state once so the halt still fires from a limit-state configuration
    (c = 1), or counts down c dedicated states (c >= 2).

Cell map: in0 = phase bit, scr0 = flash flag, out0 = final lap,
scr[2, 2+a) and scr[2+a, 2+a+b) = tally marks.  Input plays no role;
clocks run on input 0.
"""

from __future__ import annotations

import warnings

from ..machine import MachineError, Program
from ..ordinal import Ordinal, ZERO, nat, omega_power


class ClockRangeError(MachineError):
    pass


def _cnf_abc(alpha):
    a = b = c = 0
    for e, coeff in alpha.terms:
        if e == nat(2):
            a = coeff
        elif e == nat(1):
            b = coeff
        elif e == ZERO:
            c = coeff
        else:
            raise ClockRangeError(f"{alpha} is not below w^3")
    return a, b, c


def synth_clock(alpha):
    """A program whose measured clock is exactly alpha (0 < alpha < w^3)."""
    if not isinstance(alpha, Ordinal):
        raise TypeError("alpha must be an Ordinal")
    if alpha == ZERO:
        raise ClockRangeError("no program halts in zero steps")
    if alpha >= omega_power(3):
        raise ClockRangeError(f"{alpha} is not below w^3")
    a, b, c = _cnf_abc(alpha)
    rows = {}

    def row(state, reads, writes, move, nxt):
        slots = [(0, 1) if ch == "*" else (int(ch),) for ch in reads]
        pats = [()]
        for sl in slots:
            pats = [p + (v,) for p in pats for v in sl]
        for pat in pats:
            key = (state, pat)
            assert key not in rows, f"row clash at {key}"
            rows[key] = (tuple(p if w == "*" else int(w)
                               for p, w in zip(pat, writes)), move, nxt)

    def chain(entry_state, entry_reads, entry_writes, n, prefix):
        """entry -> n plain counting states -> halt."""
        if n == 1:
            row(entry_state, entry_reads, entry_writes, "R", "H")
            return
        row(entry_state, entry_reads, entry_writes, "R", f"{prefix}1")
        for i in range(1, n):
            nxt = "H" if i == n - 1 else f"{prefix}{i + 1}"
            row(f"{prefix}{i}", "***", "***", "R", nxt)

    def tail(entry_pattern):
        """Wire the closing limit to a halt exactly c paper-steps later."""
        if c == 0:
            row("L", entry_pattern, "***", "R", "H")
        elif c == 1:
            row("L", entry_pattern, "11*", "L", "L")
            row("L", "111", "***", "R", "H")
        else:
            chain("L", entry_pattern, "***", c, "t")

    def walk_home(start_pos, writes_at_zero, prefix):
        """From start_pos back to cell 0, plant flag bits, then wait."""
        target = f"{prefix}_{start_pos}"
        for pos in range(start_pos, -1, -1):
            nxt = f"{prefix}_{pos - 1}" if pos > 0 else f"{prefix}_set"
            row(f"{prefix}_{pos}", "***", "***", "L", nxt)
        row(f"{prefix}_set", "***", writes_at_zero, "R", "W")
        return target

    if a == 0 and b == 0:
        chain("S", "***", "***", c, "t")
        row("L", "***", "***", "R", "H")
        return _build(f"clock_{alpha}", rows, "S")

    row("W", "***", "***", "R", "W")

    start_writes = ["*", "*", "*"]
    if a == 0:
        start_writes[0] = "1"
        if b == 1:
            start_writes[2] = "1"
    elif a == 1 and b == 0:
        start_writes[2] = "1"
    row("S", "***", "".join(start_writes), "R", "W")

    if a > 0:
        # plain limit in the w^2 stretch: flash the flag (final lap or not)
        row("L", "00*", "01*", "L", "F")
        row("F", "01*", "00*", "R", "W")
        if a == 1 and b == 0:
            tail("011")                       # the only compound is the last
        else:
            # ordinary compound: clear the flag, tally, maybe plant flags
            row("L", "010", "*0*", "R", "adv_a@1")
            if b == 0:
                tail("011")
            # the walk scans tally slots scr[2 .. 2+a)
            row("adv_a@1", "***", "***", "R", "adv_a@2")
            for k in range(a):
                pos = 2 + k
                nxt = f"adv_a@{pos + 1}" if k + 1 < a else "X"
                row(f"adv_a@{pos}", "*1*", "***", "R", nxt)
                switches = (k + 1 == a)            # tally a: enter w phase
                arms = (b == 0 and k + 1 == a - 1)  # tally a-1: arm final lap
                if switches:
                    w = ("1", "*", "1" if b == 1 else "*")
                    home = walk_home(pos - 1, "".join(w), f"ha{k}")
                    row(f"adv_a@{pos}", "*0*", "*1*", "L", home)
                elif arms:
                    home = walk_home(pos - 1, "**1", f"ha{k}")
                    row(f"adv_a@{pos}", "*0*", "*1*", "L", home)
                else:
                    row(f"adv_a@{pos}", "*0*", "*1*", "R", "W")

    if b > 0:
        if b == 1:
            tail("101")                       # the only w limit is the last
        else:
            row("L", "100", "***", "R", "adv_b@1")
            tail("101")
            first = 2 + a
            for pos in range(1, first):
                row(f"adv_b@{pos}", "***", "***", "R", f"adv_b@{pos + 1}")
            for k in range(b):
                pos = first + k
                nxt = f"adv_b@{pos + 1}" if k + 1 < b else "X"
                row(f"adv_b@{pos}", "*1*", "***", "R", nxt)
                if k + 1 == b - 1:            # arm the final lap
                    home = walk_home(pos - 1, "**1", f"hb{k}")
                    row(f"adv_b@{pos}", "*0*", "*1*", "L", home)
                else:
                    row(f"adv_b@{pos}", "*0*", "*1*", "R", "W")

    row("X", "***", "***", "R", "X")
    return _build(f"clock_{alpha}", rows, "S")


def _build(name, rows, start):
    states = []
    for (state, _), (_, _, nxt) in rows.items():
        for s in (state, nxt):
            if s not in states:
                states.append(s)
    for s in ("L", "H"):
        if s not in states:
            states.append(s)
    if any(s == "X" for s in states) is False:
        states.append("X")
        for v in range(8):
            pat = ((v >> 2) & 1, (v >> 1) & 1, v & 1)
            rows[("X", pat)] = (pat, "R", "X")
    # fill every remaining hole with a spin into X (unreachable by
    # construction; keeps the table total)
    for state in list(states):
        if state == "H":
            continue
        for v in range(8):
            pat = ((v >> 2) & 1, (v >> 1) & 1, v & 1)
            if (state, pat) not in rows:
                rows[(state, pat)] = (pat, "R", "X")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return Program(name, 3, tuple(states), start, "L", "H", None, rows)
