"""Kazhdan-Lusztig bases, cells and modular descent for finite Coxeter groups
with unequal parameters."""

__version__ = "0.1.0"
