"""Topological analysis of doubly periodic 2-D flows via Reeb graphs and COT strings."""

__version__ = "0.1.0"
