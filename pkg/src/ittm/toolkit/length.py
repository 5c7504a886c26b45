def length_machine(*a, **k): raise NotImplementedError
def synth_length_input(*a, **k): raise NotImplementedError
