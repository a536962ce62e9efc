"""Build script: compiles the optional Cython integration kernel.

The package works without the extension (a pure-python kernel is selected at
import time), so compilation failures only cost speed.  Set GEOPOL_SKIP_EXT=1
to skip the extension build entirely.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that degrades to a warning when the compiler is missing."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any toolchain failure is non-fatal
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print("=" * 70, file=sys.stderr)
        print("geopol: compiled kernel build failed, falling back to the", file=sys.stderr)
        print("pure-python integrator (slower, otherwise identical).", file=sys.stderr)
        print(f"reason: {exc}", file=sys.stderr)
        print("=" * 70, file=sys.stderr)


def extension_modules():
    if os.environ.get("GEOPOL_SKIP_EXT"):
        return []
    if not os.path.exists("src/geopol/_kernel/_ckernel.pyx"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError as exc:
        print(f"geopol: Cython/numpy unavailable ({exc}); building without the "
              "compiled kernel", file=sys.stderr)
        return []
    ext = Extension(
        "geopol._kernel._ckernel",
        ["src/geopol/_kernel/_ckernel.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=extension_modules(),
    cmdclass={"build_ext": optional_build_ext},
)
