"""Exact computations in the Temperley-Lieb category and the Bar-Natan
dotted-cobordism bicategory: Jones-Wenzl and generalized idempotents,
colored complexes, truncated categorified projectors, quantum annular
closures, and arc-algebra quantum Hochschild homology."""

__version__ = "0.1.0"
