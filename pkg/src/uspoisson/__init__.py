"""uspoisson - Ultraspherical spectral solver for Poisson-type equations.

Solves Poisson, separable-coefficient and clamped fourth-order problems on
[-1,1]^2 with basis recombination and Zolotarev-shifted ADI.
"""
# Created: 2026-10-18

__version__ = "0.1.0"
__author__ = "uspoisson Contributors"
__license__ = "MIT"
