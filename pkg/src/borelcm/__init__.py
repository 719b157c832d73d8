"""Exact models of equivariant cohomology for cohomogeneity one group
diagrams, and Cohen-Macaulay decisions built on them."""

__version__ = "0.1.0"
