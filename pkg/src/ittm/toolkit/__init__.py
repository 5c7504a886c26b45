"""Program constructions: clocks, argument fixing, fixed points, races."""

from .clocks import synth_clock
from .core import fixed_point, quine, race, smn, speedup
from .length import length_machine, synth_length_input
from .stdlib import StdlibEntry, get_stdlib, stdlib_names

__all__ = [
    "synth_clock", "synth_length_input", "length_machine",
    "smn", "speedup", "fixed_point", "quine", "race",
    "StdlibEntry", "get_stdlib", "stdlib_names",
]
