from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    import numpy as np
except ImportError:
    # Pure-Python install: radsched.kernels falls back to the Python kernels.
    ext_modules = []
else:
    ext = Extension(
        "radsched.kernels._fast",
        ["src/radsched/kernels/_fast.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], language_level=3)

setup(ext_modules=ext_modules)
