"""Elzaki-transform bound states of the N-dimensional Schroedinger equation."""
