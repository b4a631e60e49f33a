from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; _backend falls back to NumPy
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "threshflux._fvkernel",
                ["src/threshflux/_fvkernel.pyx"],
                # finite-math lets the min/max reductions vectorise; no reassociation is enabled
                extra_compile_args=["-O3", "-ffinite-math-only", "-fno-signed-zeros"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
