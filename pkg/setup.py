import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "rtslvc._search_core",
        ["src/rtslvc/_search_core.pyx"],
        include_dirs=[np.get_include()],
        # -ffp-contract=off: no FMA fusion, so floating-point results match
        # the pure-Python reference kernel bit for bit
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
)
