"""Build the optional Cython kernels.

The package works without them; ``shape_aligner._backend`` falls back to the
pure-Python kernels when the extension is missing.
"""
import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "shape_aligner._kernels",
                ["src/shape_aligner/_kernels.pyx"],
                include_dirs=[np.get_include()],
                # no -ffast-math / -march=native: results must stay bit-identical
                # to the Python fallback
                extra_compile_args=["-O3", "-ffp-contract=off"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
