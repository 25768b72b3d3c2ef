import os

from setuptools import Extension, setup

# EFFODE_NO_EXT=1 skips the compiled core; the package then runs on the
# pure-Python kernel fallback.
if os.environ.get("EFFODE_NO_EXT"):
    ext_modules = []
else:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "effode._kernels._rk4",
                ["src/effode/_kernels/_rk4.pyx"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
