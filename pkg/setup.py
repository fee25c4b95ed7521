"""Build script for the optional compiled integrator core.

The package works without the extension (a pure-python stepper is selected
at import time), but the Cython core is roughly an order of magnitude
faster on long high-accuracy integrations.  Set DJCG_NO_EXT=1 to skip
building it.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("DJCG_NO_EXT"):
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "djcg._core",
                ["src/djcg/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
