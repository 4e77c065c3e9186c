"""Build script: compiles the optional Cython kernel.

The package works without the extension (a pure-Python fallback is
selected at import time), so a missing compiler or Cython only costs
performance. `pip install -e . --no-build-isolation` is the recommended
install in environments that already ship setuptools and Cython.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Skip the extension (with a warning) instead of failing the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        sys.stderr.write(
            f"WARNING: building the chiralqed._kernels extension failed ({exc}); "
            "falling back to the pure-Python integration kernel.\n"
        )


def extensions():
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        sys.stderr.write(
            "WARNING: Cython not available; installing with the pure-Python "
            "integration kernel only.\n"
        )
        return []
    return cythonize(
        [
            Extension(
                "chiralqed._kernels",
                ["src/chiralqed/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
