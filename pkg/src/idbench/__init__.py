"""idbench: gold-standard identifier relatedness/similarity benchmarks and
evaluation of semantic representations against them."""

__version__ = "0.1.0"
