import os
import sys

from setuptools import Extension, setup

# The compiled kernels are optional: the package falls back to the pure
# numpy implementations in gmeact._pykernels when the extension is missing.
ext_modules = []
if os.environ.get("GMEACT_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "gmeact._ckernels",
                    ["src/gmeact/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        print("Cython not available, building without compiled kernels", file=sys.stderr)

setup(ext_modules=ext_modules)
