"""Exact Gram determinants of crossingless connections on the disc, annulus and Moebius band."""

__version__ = "0.1.0"
