"""Build script for the optional compiled kernels.

The package is fully functional without the extension (a pure-Python
fallback with identical arithmetic is selected at import time), so a
failed compile must not break installation.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible; warn and continue if not."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing, etc.
            sys.stderr.write(f"warning: compiled kernels skipped ({exc})\n")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            sys.stderr.write(f"warning: {ext.name} skipped ({exc})\n")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "henonlab._fastkernels",
        sources=["src/henonlab/_fastkernels.pyx"],
        # fp-contract off: the fallback must stay bit-identical, so no FMA
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
