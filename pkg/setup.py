import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("ONTOSEARCH_NO_EXTENSION"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "ontosearch._kernels",
                    ["src/ontosearch/_kernels.pyx"],
                    # no contraction into FMA: keeps results bit-identical to the Python fallback
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
