"""Counter-diabatic state preparation in finite Jaynes-Cummings lattices.

Library layout:

- :mod:`jcsim.model` — fixed-excitation bases, operators, lattice Hamiltonians
- :mod:`jcsim.spectra` — eigensolves, closed-form spectra, eigenstate tracking
- :mod:`jcsim.cd` — exact and simplified counter-diabatic Hamiltonians
- :mod:`jcsim.evolve` — unitary and Lindblad time evolution
- :mod:`jcsim.noise` — Gaussian control-error ensembles
- :mod:`jcsim.cli` — scenario-driven command line (``jcsim``)
"""

__version__ = "0.1.0"
