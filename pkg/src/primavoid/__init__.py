"""Primitive elements of F_{q^r} avoiding r affine hyperplanes in general position."""

__version__ = "0.1.0"
