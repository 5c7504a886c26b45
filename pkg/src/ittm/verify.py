"""Independent replay checking of trace certificates.

The verifier shares only ``machine.step`` and the word/ordinal
primitives with the engine.  It replays every successor segment step by
step, re-derives every limit jump's cycle window and checks the cycle
precondition and the limsup tapes itself, tracks stage arithmetic with
ordinal operations, rebuilds block normalisations for the higher-level
jumps, and finally checks that the claimed verdict is the one the
replayed records support.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import machine as M
from .engine import (
    BlockCycleDescriptor, CycleDescriptor, LimitJump, Segment,
    TraceCertificate, Verdict, serialize_snapshot,
)
from .ordinal import OMEGA, Ordinal, ZERO, omega_power, parse_ordinal
from .word import Word, ZERO_WORD, parse_word, pointwise_or, zeros_preserved


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: str = "ok"

    def __bool__(self):
        return self.ok


def _fail(reason):
    return VerifyResult(False, reason)


def verify_trace(program, cert, oracle=None):
    """True iff the certificate is a faithful record of the program's run."""
    try:
        return _verify(program, cert, oracle)
    except (M.MachineError, ValueError, KeyError, IndexError) as e:
        return _fail(f"malformed: {e}")


def _oracle_parts(oracle):
    if oracle is None:
        return None, None
    answer = getattr(oracle, "answer", None)
    if answer is None and callable(oracle):
        answer = oracle
    return answer, getattr(oracle, "preload", None)


def _verify(program, cert, oracle):
    if cert.program_number != M.encode(program):
        return _fail("program number does not match the supplied program")
    answer, preload = _oracle_parts(oracle)
    current = M.initial_snapshot(program, cert.input_word, preload)
    stage = ZERO
    halted_in_segment = None
    prev_state_before_halt = None

    top = max(lv.level for lv in cert.records if isinstance(lv, LimitJump)) \
        if any(isinstance(r, LimitJump) for r in cert.records) else 0
    depth = max(top + 1, 1)
    levels = [[] for _ in range(depth)]          # (entry_stage, digest, summary)
    acc_entry = [ZERO] * (depth + 1)
    acc_digest = [[] for _ in range(depth + 1)]
    acc_summary = [[] for _ in range(depth + 1)]
    limits = []                                   # (stage, snapshot, interval)

    block_written = [set() for _ in current.tapes]
    block_entry_snap = current

    def push_digest(line):
        for acc in acc_digest:
            acc.append(line)

    n_rec = len(cert.records)
    for idx, rec in enumerate(cert.records):
        if halted_in_segment is not None:
            return _fail("records continue after a halting segment")
        if isinstance(rec, Segment):
            if rec.stage != stage:
                return _fail(f"segment stage {rec.stage} != replay stage {stage}")
            if rec.snapshot != current:
                return _fail("segment snapshot differs from replayed configuration")
            if rec.steps < 1:
                return _fail("segment with no steps")
            rel = stage.minus(acc_entry[0])
            push_digest(f"SEG {rel} {rec.steps} {serialize_snapshot(rec.snapshot)}")
            for k in range(rec.steps):
                prev_state = current.state
                pos = current.head
                current = M.step(program, current, answer)
                for i, t in enumerate(current.tapes):
                    if t.read(pos):
                        block_written[i].add(pos)
                if current.state == program.halt:
                    if k != rec.steps - 1:
                        return _fail("halt inside a segment")
                    halted_in_segment = stage + rec.steps
                    prev_state_before_halt = prev_state
            stage = stage + rec.steps
            continue

        if not isinstance(rec, LimitJump):
            return _fail("unknown record type")
        d = rec.descriptor
        if rec.snapshot.head != 0 or rec.snapshot.state != program.limit:
            return _fail("limit snapshot must rest on cell 0 in the limit state")

        if rec.level == 0:
            if not isinstance(d, CycleDescriptor):
                return _fail("level-0 jump needs a cycle descriptor")
            if d.start_stage != stage:
                return _fail("cycle start stage does not match the replay")
            if d.start_snapshot != current:
                return _fail("cycle start snapshot does not match the replay")
            if d.period < 1:
                return _fail("empty cycle")
            window = [current]
            for _ in range(d.period):
                pos = current.head
                current = M.step(program, current, answer)
                for i, t in enumerate(current.tapes):
                    if t.read(pos):
                        block_written[i].add(pos)
                if current.state == program.halt:
                    return _fail("halt inside a cycle window")
                window.append(current)
            first, last = window[0], window[-1]
            m = min(s.head for s in window)
            n_tapes = len(first.tapes)
            or_words = tuple(pointwise_or([s.tapes[i] for s in window])
                             for i in range(n_tapes))
            if or_words != d.or_words:
                return _fail("cycle member OR summary mismatch")
            if d.shift == 0:
                if first != last:
                    return _fail("claimed exact cycle does not reoccur")
                limit_tapes = or_words
                extra = None
            else:
                if not _shift_ok(first, last, d.shift, m):
                    return _fail("claimed lasso fails the translation check")
                limit_tapes = tuple(
                    Word(t.expand(m), bytes(t.read(m + j) for j in range(d.shift)))
                    for t in last.tapes)
                extra = tuple(_smear(w, m, d.shift) for w in or_words)
            if tuple(rec.snapshot.tapes) != limit_tapes:
                return _fail("limit snapshot does not equal the cycle's limsup")
            want_stage = d.start_stage + OMEGA
            if rec.stage != want_stage or rec.stage != acc_entry[0].next_limit():
                return _fail("limit stage is not the next limit ordinal")
            interval = []
            for i in range(n_tapes):
                parts = [block_entry_snap.tapes[i], _ones(block_written[i]),
                         or_words[i], limit_tapes[i]]
                if extra:
                    parts.append(extra[i])
                interval.append(pointwise_or(parts))
            interval = tuple(interval)
            if interval != rec.interval_or:
                return _fail("interval activity summary mismatch")
            rel = d.start_stage.minus(acc_entry[0])
            push_digest(f"LIM 0 {rel} {d.period} {d.shift} "
                        f"{serialize_snapshot(rec.snapshot)}")
            close_level = 0
        else:
            if not isinstance(d, BlockCycleDescriptor):
                return _fail("higher-level jump needs a block descriptor")
            lvl = rec.level - 1
            if lvl >= len(levels):
                return _fail("jump level beyond any completed blocks")
            blocks = levels[lvl]
            i_hit = [i for i, b in enumerate(blocks) if b[0] == d.start_stage]
            if not i_hit:
                return _fail("no completed block at the claimed cycle start")
            i = i_hit[0]
            j = len(blocks) - 1
            if j - i != d.period_blocks or d.period_blocks < 1:
                return _fail("block cycle period mismatch")
            if blocks[i][1] != blocks[j][1]:
                return _fail("block descriptors at the cycle ends differ")
            n_tapes = len(current.tapes)
            cyc_or = tuple(pointwise_or([blocks[r][2][k] for r in range(i, j)])
                           for k in range(n_tapes))
            if cyc_or != d.or_words or cyc_or != rec.interval_or:
                return _fail("block cycle OR summary mismatch")
            if tuple(rec.snapshot.tapes) != cyc_or:
                return _fail("higher limit snapshot must OR the cycle blocks")
            if rec.stage != d.start_stage + omega_power(rec.level + 1):
                return _fail("higher limit stage off the grid")
            rel = d.start_stage.minus(acc_entry[rec.level])
            push_digest(f"LIM {rec.level} {rel} {d.period_blocks} "
                        f"{serialize_snapshot(rec.snapshot)}")
            interval = cyc_or
            close_level = rec.level

        # strong-repeat bookkeeping and block closing, verifier-side
        stage = rec.stage
        current = rec.snapshot
        limits.append((stage, rec.snapshot, interval))

        lvl = close_level
        if lvl > 0:
            levels[lvl - 1] = []
        entry_stage = acc_entry[lvl]
        digest = "\n".join(acc_digest[lvl])
        summary = _or_cols(acc_summary[lvl] + [interval])
        if lvl < len(levels):
            levels[lvl].append((entry_stage, digest, summary))
        acc_entry[lvl] = stage
        acc_digest[lvl] = []
        acc_summary[lvl] = []
        if lvl + 1 < len(acc_summary):
            acc_summary[lvl + 1].append(summary)
        for low in range(lvl):
            acc_entry[low] = stage
            acc_digest[low] = []
            acc_summary[low] = []
        block_written = [set() for _ in current.tapes]
        block_entry_snap = current

    # the verdict must match what the replay established
    v = cert.verdict
    if v.kind == "halted":
        if halted_in_segment is None:
            return _fail("halted verdict without a halting segment")
        if v.stage != halted_in_segment:
            return _fail("halting stage mismatch")
        want_paper = v.stage.predecessor() \
            if prev_state_before_halt == program.limit else v.stage
        if v.paper_clock != want_paper:
            return _fail("paper clock mismatch")
        if v.output != current.tapes[2]:
            return _fail("output word mismatch")
        return VerifyResult(True)
    if halted_in_segment is not None:
        return _fail("run halted but verdict says otherwise")
    if v.kind == "nonhalting":
        if not cert.records or not isinstance(cert.records[-1], LimitJump):
            return _fail("nonhalting verdict needs a final limit jump")
        if v.stage != stage:
            return _fail("repeat_to stage mismatch")
        final = cert.records[-1].snapshot
        candidates = [k for k, (st, sn, _) in enumerate(limits)
                      if st == v.repeat_from]
        if not candidates:
            return _fail("repeat_from is not a recorded limit stage")
        k = candidates[0]
        old_stage, old_snap, _ = limits[k]
        if old_snap != final:
            return _fail("strong repeat snapshots differ")
        between = [iv for (_, _, iv) in limits[k + 1:]]
        for i, ref in enumerate(final.tapes):
            if not zeros_preserved(ref, [iv[i] for iv in between]):
                return _fail("zeros not preserved across the repeat interval")
        return VerifyResult(True)
    if v.kind == "budget":
        if v.stage != stage:
            return _fail("budget stage mismatch")
        return VerifyResult(True)
    return _fail(f"unknown verdict kind {v.kind!r}")


def _shift_ok(first, last, d, m):
    if last.state != first.state or last.head != first.head + d or d <= 0:
        return False
    for a, b in zip(first.tapes, last.tapes):
        if a.expand(m) != b.expand(m):
            return False
        if a.drop(m) != b.drop(m + d):
            return False
    return True


def _smear(p0, m, d):
    """OR of the right-shifts of p0's suffix [m, oo) by multiples of d."""
    from math import gcd
    q = len(p0.period)
    lcm = d * q // gcd(d, q)
    span = max(len(p0.prefix), m) + lcm + d
    vals = bytearray(span + 2 * d)
    acc = [0] * d
    pos = m
    while pos + d < len(vals):
        r = (pos - m) % d
        acc[r] |= p0.read(pos)
        vals[pos + d] = acc[r]
        pos += 1
    head = len(vals) - d
    return Word(bytes(vals[:head]), bytes(vals[head:]))


def _ones(positions):
    if not positions:
        return ZERO_WORD
    top = max(positions)
    bits = bytearray(top + 1)
    for p in positions:
        bits[p] = 1
    return Word(bytes(bits), b"\x00")


def _or_cols(parts):
    assert parts
    n = len(parts[0])
    return tuple(pointwise_or([p[i] for p in parts]) for i in range(n))


# --------------------------------------------------------------------------
# Certificate text round-trip


def parse_certificate(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 3 or not lines[0].startswith("PROGRAM ") \
            or not lines[1].startswith("INPUT "):
        raise ValueError("certificate must begin with PROGRAM and INPUT lines")
    number = int(lines[0][len("PROGRAM "):])
    input_word = parse_word(lines[1][len("INPUT "):])
    records = []
    verdict = None
    for ln in lines[2:]:
        if ln.startswith("VERDICT "):
            if verdict is not None:
                raise ValueError("multiple VERDICT lines")
            verdict = _parse_verdict(ln)
            continue
        if verdict is not None:
            raise ValueError("records after the VERDICT line")
        records.append(_parse_record(ln))
    if verdict is None:
        raise ValueError("certificate lacks a VERDICT line")
    return TraceCertificate(number, input_word, tuple(records), verdict)


def _parse_verdict(ln):
    parts = ln.split()
    if parts[1] == "halted" and len(parts) == 5:
        return Verdict("halted", parse_ordinal(parts[2]),
                       paper_clock=parse_ordinal(parts[3]),
                       output=parse_word(parts[4]))
    if parts[1] == "nonhalting" and len(parts) == 4:
        return Verdict("nonhalting", parse_ordinal(parts[3]),
                       repeat_from=parse_ordinal(parts[2]))
    if parts[1] == "budget" and len(parts) == 3:
        return Verdict("budget", parse_ordinal(parts[2]))
    raise ValueError(f"bad verdict line: {ln!r}")


def _parse_snapshot(text):
    parts = text.split(",")
    if len(parts) not in (5, 6):
        raise ValueError(f"bad snapshot: {text!r}")
    tapes = tuple(parse_word(p) for p in parts[2:])
    return M.Snapshot(parts[0], int(parts[1]), tapes)


def _parse_words(text):
    return tuple(parse_word(p) for p in text.split("/"))


def _parse_record(ln):
    parts = ln.split(" ", 3)
    if parts[0] != "STAGE" or len(parts) != 4:
        raise ValueError(f"bad record line: {ln!r}")
    stage = parse_ordinal(parts[1])
    rest = parts[3]
    if parts[2] == "SEG":
        steps, snap = rest.split(" ", 1)
        return Segment(stage, int(steps), _parse_snapshot(snap))
    if parts[2] != "LIMIT":
        raise ValueError(f"bad record line: {ln!r}")
    level, desc, iv, snap = rest.split(" ", 3)
    level = int(level)
    if not iv.startswith("iv="):
        raise ValueError("missing interval summary")
    interval = _parse_words(iv[3:])
    snapshot = _parse_snapshot(snap)
    if desc.startswith("cyc[") and desc.endswith("]"):
        fields = dict(kv.split("=", 1) for kv in desc[4:-1].split(";"))
        d = CycleDescriptor(parse_ordinal(fields["start"]),
                            _parse_snapshot(fields["snap"]),
                            int(fields["period"]), int(fields["shift"]),
                            _parse_words(fields["or"]))
    elif desc.startswith("blk[") and desc.endswith("]"):
        fields = dict(kv.split("=", 1) for kv in desc[4:-1].split(";"))
        d = BlockCycleDescriptor(parse_ordinal(fields["start"]),
                                 int(fields["period"]),
                                 _parse_words(fields["or"]))
    else:
        raise ValueError(f"bad descriptor: {desc!r}")
    return LimitJump(stage, level, d, snapshot, interval)
