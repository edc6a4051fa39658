"""Build script for the optional Cython MC kernel.

The extension is best-effort: if Cython or a C compiler is missing the
package still installs and grsklab.sampling falls back to the pure-numpy
kernel (selected at import time).
"""
import numpy as np
from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/grsklab/_mckernel.pyx",
        compiler_directives={"language_level": "3"},
    )
except Exception:  # pragma: no cover - build-environment dependent
    ext_modules = []

setup(ext_modules=ext_modules, include_dirs=[np.get_include()])
