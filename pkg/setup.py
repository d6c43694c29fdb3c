"""Build hook for the optional compiled engine.

If Cython or a C++ compiler is missing the package still installs and the
pure-Python engine is used.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("CODED_RELAY_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "coded_relay.sim._cengine",
                    ["src/coded_relay/sim/_cengine.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O2"],
                    language="c++",
                )
            ],
            compiler_directives={"language_level": 3},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
