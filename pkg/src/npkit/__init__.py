"""npkit: a toolkit for creating, validating, content-addressing, signing,
grouping, publishing, and reliably retrieving nanopublications."""

__version__ = "0.1.0"
