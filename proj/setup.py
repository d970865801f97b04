"""CMake-driven build of the hdcos python package.

The extension and the C++ core are configured by the top-level
CMakeLists.txt; this shim points CMake's python output at the wheel
staging directory. Use `pip install -e . --no-build-isolation`.
"""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        extdir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)
        source_dir = Path(__file__).resolve().parent

        cfg_args = [
            f"-DHDCOS_PY_OUTPUT_DIR={extdir}",
            "-DSKBUILD=2",  # skip test targets inside pip builds
            "-DCMAKE_BUILD_TYPE=Release",
            f"-DPython3_EXECUTABLE={sys.executable}",
        ]
        try:
            import pybind11

            cfg_args.append(f"-Dpybind11_DIR={pybind11.get_cmake_dir()}")
        except ImportError:
            pass

        env = os.environ.copy()
        subprocess.run(["cmake", "-S", str(source_dir), "-B", str(build_dir), *cfg_args],
                       check=True, env=env)
        subprocess.run(["cmake", "--build", str(build_dir), "--target", "_core", "-j"],
                       check=True, env=env)

        pkg_init = Path(extdir) / "__init__.py"
        pkg_init.parent.mkdir(parents=True, exist_ok=True)
        pkg_init.write_text((source_dir / "python" / "hdcos" / "__init__.py").read_text())


setup(
    ext_modules=[CMakeExtension("hdcos._core")],
    cmdclass={"build_ext": CMakeBuild},
)
