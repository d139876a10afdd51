import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("WORDCQ_SKIP_NATIVE"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("wordcq.kernel._native", ["src/wordcq/kernel/_native.pyx"])],
            language_level=3,
        )
    except ImportError:
        # Pure-Python kernel is selected at import time when the
        # extension is unavailable.
        ext_modules = []

setup(ext_modules=ext_modules)
