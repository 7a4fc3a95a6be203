"""Twist deformation quantization of Hopf algebras, modules, maps and connections."""

__version__ = "0.1.0"
