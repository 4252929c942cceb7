"""Build hook for the optional compiled Evans kernel.

If Cython or a C compiler is unavailable the package still installs and
uses the pure-Python kernel.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "viscoevans.evans._kernels",
                ["src/viscoevans/evans/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
