import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("FEDGEN_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "fedgen._kernels_c",
                    ["src/fedgen/_kernels_c.pyx"],
                    # -ffp-contract=off keeps the C kernels bit-identical to the
                    # pure-Python fallback (no FMA contraction).
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
