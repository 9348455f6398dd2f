"""aqtrain: train small neural networks by simulated adiabatic quantum evolution.

The package compiles polynomial objectives (network losses, potentials on
the unit interval) into diagonal qubit Hamiltonians, runs Trotterized
adiabatic evolution on a state-vector simulator, and ships the experiment
harness that reproduces the bundled study configurations.
"""

__version__ = "0.1.0"
