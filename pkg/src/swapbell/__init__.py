"""Numerical verification of the entanglement-swapping Bell test.

Subpackages:
  states       dense state vectors, Pauli-string observables, sampling
  bellalg      Bell bases, the eps(+-1) states, algebra manifest
  lhv          exhaustive local-hidden-variable enumeration
  predictions  Bell-operator bounds, visibility, event-ready Monte Carlo
  optics       two-photon dual-rail selector simulation and layout search
  cli          command-line entry point
"""

__version__ = "0.1.0"
