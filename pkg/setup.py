import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # the numpy fallback in _modp_py is used instead
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "toricjac._modp",
                ["src/toricjac/_modp.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
