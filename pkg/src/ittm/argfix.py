"""Fixing an argument into a program: the s-m-n prologue.

fixed_argument_program(q, k) builds the program that, on input x,
rewrites the input tape to the interleaving <k, x> (k on even cells, x
on odd cells) and then behaves exactly as q.  The spread of x is done by
repeated right-shifts of a shrinking suffix: a pass with boundary b
moves every input cell from b rightwards one cell, so cell j ends up at
2j+1 after the passes b = E-1 .. 0.

The end E of the input's support is found once, by scanning for
SUPPORT_GAP consecutive zeros, so inputs must be finitely supported with
no zero run of SUPPORT_GAP or more inside the support.  On such inputs
the prologue is finite and crosses no limit stage.

Tape marks during the prologue: scratch cell 0 anchors cell zero, the
output tape holds the current shift boundary and an end-of-content mark
that every pass pushes one cell right.  All marks are clean again when
q takes over.
"""

from __future__ import annotations

import warnings

from .machine import MachineError, Program

SUPPORT_GAP = 8


def fixed_argument_program(q, k):
    if not k.is_finitely_supported():
        raise MachineError("fixed arguments must be finitely supported words")
    if q.tapes != 3:
        raise MachineError("fixed arguments apply to 3-tape programs")
    k_bits = [k.read(i) for i in range(k.support_bound())]
    G = SUPPORT_GAP
    rows = {}

    def row(state, reads, writes, move, nxt):
        slots = [(0, 1) if c == "*" else (int(c),) for c in reads]
        pats = [()]
        for s in slots:
            pats = [p + (v,) for p in pats for v in s]
        for pat in pats:
            key = (state, pat)
            assert key not in rows, key
            concrete = tuple(p if w == "*" else int(w)
                             for p, w in zip(pat, writes))
            rows[key] = (concrete, move, nxt)

    done = "fix.done" if not k_bits else "fix.wk0"

    # anchor cell 0 on the scratch tape, then scan for the support gap
    row("fix.init", "***", "*1*", "R", "fix.scan0")
    for z in range(G):
        row(f"fix.scan{z}", "0**", "***", "R", f"fix.scan{z + 1}")
        row(f"fix.scan{z}", "1**", "***", "R", "fix.scan0")
    # gap found with the head G cells past the support bound E; walk back
    row(f"fix.scan{G}", "***", "***", "L", f"fix.park{G - 1}")
    for z in range(G - 1, 0, -1):
        row(f"fix.park{z}", "***", "***", "L", f"fix.park{z - 1}")
    # park0 sits on cell E (pinned at 0 when E = 0), always a zero cell
    row("fix.park0", "*1*", "***", "L", done)              # E = 0: nothing to spread
    row("fix.park0", "*0*", "**1", "L", "fix.park0b")      # end-of-content mark at E
    # park0b sits on cell E-1, the first boundary
    row("fix.park0b", "11*", "01*", "R", "fix.lsweep.1")   # E = 1: single, final pass
    row("fix.park0b", "01*", "01*", "R", "fix.lsweep.0")
    row("fix.park0b", "*0*", "**1", "L", "fix.rewind")     # boundary mark at E-1
    # rewind to the anchored cell 0, then walk right to the boundary
    row("fix.rewind", "*0*", "***", "L", "fix.rewind")
    row("fix.rewind", "*1*", "***", "L", "fix.seek")
    row("fix.seek", "**0", "***", "R", "fix.seek")
    for c in (0, 1):
        # ordinary pass: lift the boundary cell's bit, move the boundary
        # one cell left, then shift everything to the right by one
        row("fix.seek", f"{c}01", "000", "L", f"fix.mark.{c}")
        # final pass: the boundary mark reached the anchored cell 0
        row("fix.seek", f"{c}11", "010", "R", f"fix.lsweep.{c}")
        row(f"fix.mark.{c}", "***", "**1", "R", f"fix.hop.{c}")
        row(f"fix.hop.{c}", "***", "***", "R", f"fix.sweep.{c}")
    # sweep: write the carried bit, pick up the displaced one; at the
    # end-of-content mark, deposit the carry, push the mark right, stop.
    for last in (False, True):
        tag = "lsweep" if last else "sweep"
        for c in (0, 1):
            row(f"fix.{tag}.{c}", "0*0", f"{c}**", "R", f"fix.{tag}.0")
            row(f"fix.{tag}.{c}", "1*0", f"{c}**", "R", f"fix.{tag}.1")
            row(f"fix.{tag}.{c}", "**1", f"{c}*0", "R", f"fix.{tag}end")
    # ordinary passes push the end mark one cell right; the final pass
    # leaves the output tape clean
    row("fix.sweepend", "***", "**1", "L", "fix.rewind")
    row("fix.lsweepend", "***", "***", "L", "fix.rewd")
    # after the final pass, return to cell 0 and write k on the even cells
    row("fix.rewd", "*0*", "***", "L", "fix.rewd")
    row("fix.rewd", "*1*", "***", "L", done)
    for i, bit in enumerate(k_bits):
        after = "fix.done" if i + 1 == len(k_bits) else f"fix.wk{i + 1}"
        row(f"fix.wk{i}", "***", f"{bit}**", "R", f"fix.wko{i}")
        row(f"fix.wko{i}", "***", "***", "R", after)
    # drop the anchor and hand over to q with the head pinned at cell 0
    start_q = f"m.{q.start}"
    row("fix.done", "*0*", "***", "L", "fix.done")
    row("fix.done", "*1*", "*0*", "L", start_q)

    for (state, pat), (writes, move, nxt) in q.delta.items():
        rows[(f"m.{state}", pat)] = (writes, move, f"m.{nxt}")

    fix_states = []
    for (state, _pat) in rows:
        if state.startswith("fix.") and state not in fix_states:
            fix_states.append(state)
    states = tuple(fix_states) + tuple(f"m.{s}" for s in q.states)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return Program(
            name=f"s({q.name};{k})",
            tapes=3,
            states=states,
            start="fix.init",
            limit=f"m.{q.limit}",
            halt=f"m.{q.halt}",
            query=None,
            delta=rows,
        )
