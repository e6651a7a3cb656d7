import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RESONATOR_LAB_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "resonator_lab._kernels._ckernels",
                    ["src/resonator_lab/_kernels/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython: the package still works on the pure-Python kernels.
        pass

setup(ext_modules=ext_modules)
