"""weylwit: exact witness configurations for isometries and bilinear forms,
and elliptic Weyl class tables for exceptional types."""

__version__ = "0.1.0"
