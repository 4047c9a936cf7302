"""Build hook for the optional compiled grid-tree kernel.

The package works without the extension (a pure-Python kernel is used
instead), so any failure to cythonize just means a slower install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "lssched.kernels._gridtree",
                sources=["src/lssched/kernels/_gridtree.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
