"""Build script.

The compiled kernel extension is optional: if Cython or a C compiler is
missing, the build falls back to the pure-NumPy kernels selected at import
time in ``bosetrap.kernels``.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "bosetrap._kernels_cy",
                ["src/bosetrap/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"bosetrap: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
