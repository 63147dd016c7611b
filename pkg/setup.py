from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("geostream._ckernels", ["src/geostream/_ckernels.pyx"])],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    # pure-Python kernels are used when the extension is unavailable
    ext_modules = []

setup(ext_modules=ext_modules)
