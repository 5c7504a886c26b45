"""Placeholder; filled in below."""
def smn(*a, **k): raise NotImplementedError
def speedup(*a, **k): raise NotImplementedError
def fixed_point(*a, **k): raise NotImplementedError
def quine(*a, **k): raise NotImplementedError
def race(*a, **k): raise NotImplementedError
