"""Arbitrary-precision eigenenergy bounds from power-moment recurrences.

The package computes converging lower and upper bounds — and high-accuracy
estimates — for discrete Schrödinger eigenenergies of systems whose power
moments satisfy a linear recurrence: one-dimensional problems and the planar
hydrogenic atom in a uniform magnetic field.  Recurrence-generated moments
are projected onto polynomials orthonormal under a reference weight; the
projections' squared sums form positive energy functions whose local minima
approximate eigenvalues from below and whose level sets under a crude upper
bound bracket them rigorously.

Modules: :mod:`.mpnum` (precision control and dense linear algebra),
:mod:`.mer` (moment recurrences and transfer tables), :mod:`.refweight`
(reference weights and their moments), :mod:`.oppq` (basis construction,
energy functions, minima, bounds), :mod:`.cli` (reproducible command-line
runs).
"""

__version__ = "1.0.0"
