"""Transfinite execution of ITTM programs.

Successor stages run the machine step by step.  Approaching a limit, the
engine certifies one of two level-0 behaviours over the recorded history
of the current block:

  * an exact configuration repeat: the run cycles forever, and the limit
    configuration has each cell equal to the OR of its values over one
    cycle (the limsup of an eventually periodic bit sequence);
  * a rightward translated lasso: the configuration reoccurs shifted
    right by d cells with the abandoned prefix untouched, so every cell
    stabilises and the limit tape is the abandoned region followed by
    the d-cell frontier pattern repeated forever.

Either way the engine emits a limit jump to the next limit ordinal.
Completed blocks are normalised to (entry snapshot, stage-relative
record digest) and the same repeat search runs on the block lists,
producing jumps to w^2, w^3, ... grid points.  A run ends when a
snapshot is in the halt state, when two limit snapshots form a strong
repeat (equal snapshots such that no cell that is zero in them turns to
one in between), or when a budget trips; budget exhaustion is always
reported as such, never as a non-halting verdict.

Every run produces a replayable TraceCertificate; the independent
checker lives in ``ittm.verify``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from . import machine as M
from .ordinal import OMEGA, Ordinal, ZERO, omega_power
from .word import Word, ZERO_WORD, pointwise_or, zeros_preserved


class EngineError(ValueError):
    pass


@dataclass(frozen=True)
class RunBudget:
    """Desk-scale truncation knobs for a transfinite run."""

    max_steps_per_block: int = 10 ** 5
    max_blocks_per_level: int = 10 ** 3
    max_limit_level: int = 3

    def __post_init__(self):
        if min(self.max_steps_per_block, self.max_blocks_per_level,
               self.max_limit_level) < 1:
            raise EngineError("budget fields must be positive")


DEFAULT_BUDGET = RunBudget()


# --------------------------------------------------------------------------
# Certificate records


@dataclass(frozen=True)
class Segment:
    """`steps` successor steps from `snapshot`, which sits at `stage`."""

    stage: Ordinal
    steps: int
    snapshot: M.Snapshot


@dataclass(frozen=True)
class CycleDescriptor:
    """A level-0 cycle: the snapshot at start_stage reoccurs `period`
    steps later, shifted right by `shift` cells (0 for an exact repeat)."""

    start_stage: Ordinal
    start_snapshot: M.Snapshot
    period: int
    shift: int
    or_words: tuple     # OR of each tape over the recorded window [s, t]


@dataclass(frozen=True)
class BlockCycleDescriptor:
    """A level >= 1 cycle among completed lower-level blocks."""

    start_stage: Ordinal
    period_blocks: int
    or_words: tuple     # OR of each tape over the repeating blocks


@dataclass(frozen=True)
class LimitJump:
    stage: Ordinal      # the limit stage jumped to
    level: int          # stage == descriptor.start_stage + w^(level+1)
    descriptor: object  # CycleDescriptor or BlockCycleDescriptor
    snapshot: M.Snapshot
    interval_or: tuple  # OR of all tape activity since the previous limit


@dataclass(frozen=True)
class Verdict:
    kind: str                           # halted | nonhalting | budget
    stage: Ordinal                      # halt stage / repeat_to / last stage
    paper_clock: Ordinal | None = None
    output: Word | None = None
    repeat_from: Ordinal | None = None


@dataclass(frozen=True)
class TraceCertificate:
    program_number: int
    input_word: Word
    records: tuple
    verdict: Verdict

    def serialize(self):
        lines = [f"PROGRAM {self.program_number}", f"INPUT {self.input_word}"]
        lines += [serialize_record(r) for r in self.records]
        v = self.verdict
        if v.kind == "halted":
            lines.append(f"VERDICT halted {v.stage} {v.paper_clock} {v.output}")
        elif v.kind == "nonhalting":
            lines.append(f"VERDICT nonhalting {v.repeat_from} {v.stage}")
        else:
            lines.append(f"VERDICT budget {v.stage}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RunOutcome:
    verdict: Verdict
    certificate: TraceCertificate

    @property
    def halted(self):
        return self.verdict.kind == "halted"


def serialize_snapshot(s):
    return ",".join([s.state, str(s.head)] + [str(t) for t in s.tapes])


def serialize_record(r):
    if isinstance(r, Segment):
        return f"STAGE {r.stage} SEG {r.steps} {serialize_snapshot(r.snapshot)}"
    d = r.descriptor
    ors = "/".join(str(w) for w in d.or_words)
    ivs = "/".join(str(w) for w in r.interval_or)
    if isinstance(d, CycleDescriptor):
        desc = (f"cyc[start={d.start_stage};snap={serialize_snapshot(d.start_snapshot)};"
                f"period={d.period};shift={d.shift};or={ors}]")
    else:
        desc = f"blk[start={d.start_stage};period={d.period_blocks};or={ors}]"
    return (f"STAGE {r.stage} LIMIT {r.level} {desc} iv={ivs} "
            f"{serialize_snapshot(r.snapshot)}")


# --------------------------------------------------------------------------
# Limit configurations


def limit_snapshot(cycle, translation=None, limit_state="L"):
    """The limit configuration certified by a verified cycle.

    `cycle` lists the snapshots of one full cycle *including* the closing
    reoccurrence: for an exact cycle the last element equals the first
    (the closing copy may be omitted); for a translated lasso the last
    element must be the first shifted right by `translation` cells with
    the abandoned prefix unmoved.  The head rests on cell 0 in the limit
    state; without translation each cell takes the OR of its values over
    the cycle, with translation every cell stabilises and the limit tape
    is the closing snapshot below the leftmost excursion m followed by
    its d-cell window at m repeated forever.
    """
    if not cycle:
        raise EngineError("empty cycle")
    first, last = cycle[0], cycle[-1]
    if translation:
        d = translation
        if len(cycle) < 2:
            raise EngineError("translated cycle needs its closing snapshot")
        m = min(s.head for s in cycle)
        if not _shift_matches(first, last, d, m):
            raise EngineError("list fails the translated-cycle precondition")
        tapes = tuple(Word(t.expand(m), bytes(t.read(m + j) for j in range(d)))
                      for t in last.tapes)
        return M.Snapshot(limit_state, 0, tapes)
    if len(cycle) >= 2 and last != first and last.tapes != first.tapes:
        # callers may pass the window without the closing copy; when they
        # do include it, it must match
        if last.state == first.state and last.head == first.head:
            raise EngineError("list fails the exact-cycle precondition")
    n_tapes = len(first.tapes)
    tapes = tuple(pointwise_or([s.tapes[i] for s in cycle])
                  for i in range(n_tapes))
    return M.Snapshot(limit_state, 0, tapes)


def _shift_matches(first, last, d, m):
    if last.state != first.state or last.head != first.head + d or d <= 0:
        return False
    for a, b in zip(first.tapes, last.tapes):
        if a.expand(m) != b.expand(m):           # abandoned prefix unmoved
            return False
        if a.drop(m) != b.drop(m + d):           # content translated by d
            return False
    return True


def stride_smear(p0, m, d):
    """OR of the right-shifts of p0's suffix [m, oo) by d, 2d, 3d, ...

    This is the tape activity contributed by the unrecorded repetitions
    of a lasso: repetition i replays the recorded window's activity
    shifted right by i*d cells.
    """
    q = len(p0.period)
    reps = _lcm(d, q) // d
    span = max(len(p0.prefix), m) + _lcm(d, q) + d
    # prefix-OR along each residue class mod d, starting at m
    vals = bytearray(span + 2 * d)
    acc = [0] * d
    pos = m
    while pos + d < len(vals):
        r = (pos - m) % d
        acc[r] |= p0.read(pos)
        vals[pos + d] = acc[r]
        pos += 1
    # run one more lap to let every residue's OR saturate, then the last
    # d cells repeat forever
    head = len(vals) - d
    return Word(bytes(vals[:head]), bytes(vals[head:]))


def _lcm(a, b):
    return a * b // gcd(a, b)


# --------------------------------------------------------------------------
# Mutable tape for the stepping loop: cell i < len(buf) is buf[i], beyond
# that the (suitably rotated) period repeats.


class _Tape:
    __slots__ = ("buf", "period")

    def __init__(self, w):
        self.buf = bytearray(w.prefix)
        self.period = w.period

    def read(self, i):
        if i < len(self.buf):
            return self.buf[i]
        return self.period[(i - len(self.buf)) % len(self.period)]

    def write(self, i, b):
        buf = self.buf
        per = self.period
        while i >= len(buf):
            buf.append(per[0])
            if len(per) > 1:
                per = per[1:] + per[:1]
        self.period = per
        buf[i] = b

    def word(self):
        return Word(bytes(self.buf), self.period)

    def tail(self, head):
        """Canonical (prefix, period) of the suffix starting at head."""
        buf, per = self.buf, self.period
        if head >= len(buf):
            k = (head - len(buf)) % len(per)
            w = Word(b"", per[k:] + per[:k])
            return (w.prefix, w.period)
        t = bytes(buf[head:])
        if len(per) == 1:
            return (t.rstrip(per), per)
        w = Word(t, per)
        return (w.prefix, w.period)


class _Machine:
    """Imperative mirror of machine.step over _Tape buffers."""

    __slots__ = ("p", "state", "head", "tapes", "answer")

    def __init__(self, program, snapshot, oracle_answer):
        self.p = program
        self.state = snapshot.state
        self.head = snapshot.head
        self.tapes = [_Tape(w) for w in snapshot.tapes]
        self.answer = oracle_answer

    def snapshot(self):
        return M.Snapshot(self.state, self.head,
                          tuple(t.word() for t in self.tapes))

    def step(self):
        p = self.p
        if self.state == p.halt:
            raise EngineError("cannot step a halted configuration")
        head = self.head
        if p.query is not None and self.state == p.query:
            if self.answer is None:
                raise EngineError("query state reached with no oracle")
            bit = 1 if self.answer(self.tapes[3].word()) else 0
            self.tapes[3].write(head, bit)
        reads = tuple(t.read(head) for t in self.tapes)
        writes, move, nxt = p.delta[(self.state, reads)]
        for t, w in zip(self.tapes, writes):
            if t.read(head) != w:
                t.write(head, w)
        self.head = head + 1 if move == "R" else (head - 1 if head else 0)
        self.state = nxt

    def exact_key(self):
        return hash((self.state, self.head,
                     tuple(t.tail(0) for t in self.tapes)))

    def tail_key(self):
        return hash((self.state, tuple(t.tail(self.head) for t in self.tapes)))


# --------------------------------------------------------------------------
# The run loop


class _BlockInfo:
    """A completed block at some level, normalised for cycle search."""

    __slots__ = ("entry_stage", "digest", "summary")

    def __init__(self, entry_stage, digest, summary):
        self.entry_stage = entry_stage
        self.digest = digest
        self.summary = summary


def _oracle_parts(oracle):
    if oracle is None:
        return None, None
    answer = getattr(oracle, "answer", None)
    if answer is None and callable(oracle):
        answer = oracle
    preload = getattr(oracle, "preload", None)
    return answer, preload


def run(program, input_word, budget=None, oracle=None):
    """Execute `program` on `input_word` through limit stages.

    Returns a RunOutcome; its certificate always replays under
    ``ittm.verify.verify_trace``.
    """
    budget = budget or DEFAULT_BUDGET
    answer, preload = _oracle_parts(oracle)
    snap = M.initial_snapshot(program, input_word, preload)
    return _Runner(program, snap, budget, answer, input_word).run()


def measure_clock(program, budget=None):
    """The paper-step ordinal of the program's halting run on input 0."""
    out = run(program, ZERO_WORD, budget)
    if not out.halted:
        raise EngineError(
            f"program {program.name!r} did not halt within budget "
            f"({out.verdict.kind} at stage {out.verdict.stage})")
    return out.verdict.paper_clock


class _Runner:
    def __init__(self, program, snapshot, budget, answer, input_word):
        self.p = program
        self.budget = budget
        self.answer = answer
        self.input_word = input_word
        self.records = []
        self.stage = ZERO
        self.current = snapshot
        top = budget.max_limit_level
        # levels[k]: completed blocks spanning up to the next w^(k+1) grid
        self.levels = [[] for _ in range(top)]
        # block-under-assembly bookkeeping, one slot per level
        self.acc_entry = [ZERO] * (top + 1)
        self.acc_digest = [[] for _ in range(top + 1)]
        self.acc_summary = [[] for _ in range(top + 1)]
        # limit snapshots seen so far: (stage, snapshot key, interval OR)
        self.limits = []

    # -- certificate helpers ------------------------------------------------

    def _emit(self, record, digest_line):
        self.records.append(record)
        for acc in self.acc_digest:
            acc.append(digest_line)

    def _finish(self, verdict):
        cert = TraceCertificate(M.encode(self.p), self.input_word,
                                tuple(self.records), verdict)
        return RunOutcome(verdict, cert)

    # -- main loop ------------------------------------------------------------

    def run(self):
        while True:
            result = self._run_block()
            if result is not None:
                return result

    def _run_block(self):
        """Successor steps from the current block entry up to a halt, a
        certified limit jump, or budget exhaustion."""
        p = self.p
        entry_stage = self.stage
        entry = self.current
        mac = _Machine(p, entry, self.answer)
        heads = [mac.head]
        exact_seen = {mac.exact_key(): 0}
        tail_seen = {mac.tail_key(): 0}
        written_one = [set() for _ in mac.tapes]

        steps = 0
        while steps < self.budget.max_steps_per_block:
            prev_state = mac.state
            write_pos = mac.head
            mac.step()
            steps += 1
            for i, t in enumerate(mac.tapes):
                if t.read(write_pos):
                    written_one[i].add(write_pos)
            heads.append(mac.head)
            if mac.state == p.halt:
                return self._halted(entry_stage, entry, steps, prev_state, mac)
            ek = mac.exact_key()
            tk = mac.tail_key()
            s_exact = exact_seen.get(ek)
            s_tail = tail_seen.get(tk)
            candidates = []
            if s_exact is not None:
                candidates.append((s_exact, 0))
            if s_tail is not None and s_tail != s_exact:
                d = mac.head - heads[s_tail]
                if d > 0:
                    candidates.append((s_tail, d))
            committed = None
            for s, d in sorted(candidates):
                confirmed = self._confirm(entry, s, steps, d, mac, heads)
                if confirmed is not None:
                    committed = (s, steps, d) + confirmed
                    break
            if committed is not None:
                return self._limit_jump(entry_stage, entry, committed,
                                        written_one)
            if s_exact is None:
                exact_seen[ek] = steps
            if s_tail is None:
                tail_seen[tk] = steps
        seg = Segment(entry_stage, steps, entry)
        self._emit(seg, f"SEG {steps} {serialize_snapshot(entry)}")
        return self._finish(Verdict("budget", entry_stage + steps))

    def _confirm(self, entry, s, t, d, mac, heads):
        """Re-derive the window [s, t] and check the cycle precondition
        exactly; returns (window, or_words, m) or None."""
        replay = _Machine(self.p, entry, self.answer)
        for _ in range(s):
            replay.step()
        window = [replay.snapshot()]
        for _ in range(t - s):
            replay.step()
            window.append(replay.snapshot())
        first, last = window[0], window[-1]
        m = min(heads[s:t + 1])
        if d == 0:
            ok = first == last
        else:
            ok = _shift_matches(first, last, d, m)
        if not ok:
            return None
        n_tapes = len(entry.tapes)
        or_words = tuple(pointwise_or([w.tapes[i] for w in window])
                         for i in range(n_tapes))
        return (window, or_words, m)

    def _halted(self, entry_stage, entry, steps, prev_state, mac):
        stage = entry_stage + steps
        seg = Segment(entry_stage, steps, entry)
        self._emit(seg, f"SEG {steps} {serialize_snapshot(entry)}")
        paper = stage.predecessor() if prev_state == self.p.limit else stage
        verdict = Verdict("halted", stage, paper_clock=paper,
                          output=mac.tapes[2].word())
        return self._finish(verdict)

    def _limit_jump(self, entry_stage, entry, committed, written_one):
        s, t, d, window, or_words, m = committed
        p = self.p
        closing = window[-1]
        if d == 0:
            limit_tapes = tuple(pointwise_or([w.tapes[i] for w in window])
                                for i in range(len(entry.tapes)))
            lasso_extra = None
        else:
            limit_tapes = tuple(
                Word(w.expand(m), bytes(w.read(m + j) for j in range(d)))
                for w in closing.tapes)
            lasso_extra = tuple(stride_smear(ow, m, d) for ow in or_words)
        limit_snap = M.Snapshot(p.limit, 0, limit_tapes)

        block_or = []
        for i, tape_entry in enumerate(entry.tapes):
            parts = [tape_entry, _ones_at(written_one[i]), or_words[i],
                     limit_tapes[i]]
            if lasso_extra:
                parts.append(lasso_extra[i])
            block_or.append(pointwise_or(parts))
        block_or = tuple(block_or)

        target = entry_stage.next_limit()
        if s:
            self._emit(Segment(entry_stage, s, entry),
                       f"SEG {s} {serialize_snapshot(entry)}")
        desc = CycleDescriptor(entry_stage + s, window[0], t - s, d, or_words)
        jump = LimitJump(target, 0, desc, limit_snap, block_or)
        self._emit(jump, f"LIM 0 rel={s} per={t - s} shift={d} "
                         f"snap={serialize_snapshot(limit_snap)}")
        self.stage = target
        self.current = limit_snap
        return self._cascade(0, block_or)

    def _cascade(self, level, interval_or):
        """After a limit jump at `level`: check halting verdict shapes,
        close the finished block, hunt for higher-level cycles."""
        snap = self.current
        stage = self.stage

        key = serialize_snapshot(snap)
        hit = None
        for i, (old_stage, old_key, _) in enumerate(self.limits):
            if old_key != key:
                continue
            between = [iv for (_, _, iv) in self.limits[i + 1:]] + [interval_or]
            if all(zeros_preserved(ref, [iv[k] for iv in between])
                   for k, ref in enumerate(snap.tapes)):
                hit = old_stage
                break
        if hit is not None:
            return self._finish(Verdict("nonhalting", stage, repeat_from=hit))
        self.limits.append((stage, key, interval_or))

        top = self.budget.max_limit_level
        if level >= top:
            return None
        entry_stage = self.acc_entry[level]
        digest = "\n".join(self.acc_digest[level])
        summary = _or_columns(self.acc_summary[level] + [interval_or])
        self.levels[level].append(_BlockInfo(entry_stage, digest, summary))
        self.acc_entry[level] = stage
        self.acc_digest[level] = []
        self.acc_summary[level] = []
        self.acc_summary[level + 1].append(summary)

        blocks = self.levels[level]
        if len(blocks) > self.budget.max_blocks_per_level:
            return self._finish(Verdict("budget", stage))
        if level + 2 > top:
            return None
        j = len(blocks) - 1
        for i in range(j):
            if blocks[i].digest == blocks[j].digest:
                return self._block_jump(level, i, j)
        return None

    def _block_jump(self, level, i, j):
        blocks = self.levels[level]
        start = blocks[i].entry_stage
        period = j - i
        n_tapes = len(self.current.tapes)
        cyc_or = tuple(
            pointwise_or([blocks[r].summary[k] for r in range(i, j)])
            for k in range(n_tapes))
        target = start + omega_power(level + 2)
        limit_snap = M.Snapshot(self.p.limit, 0, cyc_or)
        desc = BlockCycleDescriptor(start, period, cyc_or)
        jump = LimitJump(target, level + 1, desc, limit_snap, cyc_or)
        rel = start.minus(self.acc_entry[level + 1])
        self._emit(jump, f"LIM {level + 1} rel={rel} per={period} "
                         f"snap={serialize_snapshot(limit_snap)}")
        self.levels[level] = []
        # blocks below the jump level are absorbed into it; their
        # accumulators restart at the jump target
        for lvl in range(level + 1):
            self.acc_entry[lvl] = target
            self.acc_digest[lvl] = []
            self.acc_summary[lvl] = []
        self.stage = target
        self.current = limit_snap
        return self._cascade(level + 1, cyc_or)


def _ones_at(positions):
    if not positions:
        return ZERO_WORD
    top = max(positions)
    bits = bytearray(top + 1)
    for p in positions:
        bits[p] = 1
    return Word(bytes(bits), b"\x00")


def _or_columns(parts):
    """OR a list of tape-word tuples columnwise."""
    assert parts
    n = len(parts[0])
    return tuple(pointwise_or([p[i] for p in parts]) for i in range(n))
