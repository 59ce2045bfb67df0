"""Build script: compiles the hot-loop kernels as a C extension when possible.

The extension is optional.  If the toolchain is missing or the build fails,
the package installs anyway and falls back to the pure-NumPy kernels in
``wfeq._kernels_py`` (see ``wfeq._backend``).
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Let installation proceed when the extension cannot be compiled."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing entirely
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            "WARNING: building the wfeq compiled kernels failed; the pure-Python "
            f"fallback will be used.\n  reason: {exc}"
        )


def make_extensions():
    import numpy as np
    from Cython.Build import cythonize

    random_lib_dir = os.path.join(os.path.dirname(np.random.__file__), "lib")
    npymath_lib_dir = os.path.join(np.get_include(), "..", "lib")
    ext = Extension(
        "wfeq._kernels",
        ["src/wfeq/_kernels.pyx"],
        include_dirs=[np.get_include()],
        library_dirs=[random_lib_dir, npymath_lib_dir],
        libraries=["npyrandom", "npymath", "m"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=make_extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
