"""Build hooks for the optional compiled kernels.

The package is pure Python plus one Cython extension holding the pointwise
per-step kernels (sclerolab.kernels._speedups). If Cython or a C compiler is
unavailable the install still succeeds and the NumPy reference kernels are
used at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "sclerolab.kernels._speedups",
                sources=["src/sclerolab/kernels/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except Exception as exc:  # pragma: no cover - depends on host toolchain
    print(f"sclerolab: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
