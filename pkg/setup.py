"""Build the optional compiled kernels.

The package works without them: ``awtstat._backend`` falls back to the
NumPy implementations in ``awtstat._pykernels`` when the extension is
missing or ``AWTSTAT_PURE_PYTHON=1`` is set.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("AWTSTAT_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "awtstat._ckernels",
                    ["src/awtstat/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
