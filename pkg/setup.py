from setuptools import Extension, setup
from Cython.Build import cythonize

setup(
    ext_modules=cythonize(
        [Extension("pantosim._kernels", ["src/pantosim/_kernels.pyx"])],
        language_level="3",
    )
)
