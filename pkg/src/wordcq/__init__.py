"""Conjunctive queries over word equations: acyclicity analysis,
binary decomposition, and index-backed evaluation, with a regex-spanner
front end."""

from wordcq.kernel import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
__all__ = ["KERNEL_BACKEND", "__version__"]
