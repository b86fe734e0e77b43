import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("VIRTSRC_NO_EXTENSION", "") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:  # fall back to the pure-numpy path at runtime
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "virtsrc._core",
                    ["src/virtsrc/_core.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
