"""Exact desk-scale arithmetic for Carlitz multiple polylogarithms and
v-adic multiple zeta values over F_q(theta)."""

__version__ = "0.1.0"
