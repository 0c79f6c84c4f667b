import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

# The compiled kernels are optional: the package falls back to the pure
# numpy implementations in xlmimo.kernels._ref when the extension is absent.
ext = Extension(
    "xlmimo.kernels._core",
    ["src/xlmimo/kernels/_core.pyx"],
    include_dirs=[numpy.get_include()],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    extra_compile_args=["-O3"],
    optional=True,
)

setup(ext_modules=cythonize([ext], language_level=3))
