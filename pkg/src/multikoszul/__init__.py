"""Multi-Koszul algebras: J spaces, Koszul complexes, Tor and the A-infinity Yoneda algebra."""

__version__ = "0.1.0"
