"""Atomic units: hbar = m_e = 1."""

C = 137.036
MASS = 1.0
MC2 = MASS * C**2
COMPTON = 1.0 / (MASS * C)
