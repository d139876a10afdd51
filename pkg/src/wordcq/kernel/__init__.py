"""Suffix-index kernel with backend selection.

The compiled extension is preferred; the pure-Python twin is used when the
extension is missing or when ``WORDCQ_PURE_PYTHON=1`` is set. Both expose the
same ``SuffixKernel`` surface.
"""

import os

if os.environ.get("WORDCQ_PURE_PYTHON"):
    from wordcq.kernel.pure import BACKEND, SuffixKernel
else:
    try:
        from wordcq.kernel._native import BACKEND, SuffixKernel
    except ImportError:
        from wordcq.kernel.pure import BACKEND, SuffixKernel

__all__ = ["BACKEND", "SuffixKernel"]
