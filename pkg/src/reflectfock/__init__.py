"""Completely positive quasimultiplicative maps on G(m,1,n) and twisted Fock-space operators."""

__version__ = "0.1.0"
