"""Shipped run configurations (JSON documents loaded by :mod:`oppqbm.cli`).

One preset per published table block: the harmonic-oscillator reference run
plus every (field strength, frozen weight energy) pair of the magnetic-field
problem, ground state (``_gr``) and first excited state (``_exc1``).  Large
fields at high order are multi-hour runs at full order; trim ``orders`` for
a quick look.
"""
