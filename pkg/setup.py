"""Build script for the optional compiled kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed compile downgrades to a warning instead of
aborting the install.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    import numpy

    extensions = cythonize(
        [
            Extension(
                "riot_energy_lab._kernels._hotloops",
                ["src/riot_energy_lab/_kernels/_hotloops.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
