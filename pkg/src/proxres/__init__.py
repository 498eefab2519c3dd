"""Tunneling proximity resonances of coupled dielectric resonators.

Three levels of description of the same physics: exact single-disk waveguide
dispersion (diskmode), a 1D complex-potential double-well quasi-bound-state
solver (doublewell), and N-site non-Hermitian effective Hamiltonians
(effmodel), sharing a small numerics core.
"""

__version__ = "0.1.0"

from . import config, diskmode, doublewell, effmodel, numerics, tables  # noqa: F401
