"""Distributed compression of correlated quantum sources.

Rate-region bounds, the Bell-pair hashing protocol with Monte Carlo failure
analysis, and exact density-matrix simulation of small encoding-decoding
schemes, all checked against independent desk-scale oracles.
"""

__version__ = "0.1.0"
