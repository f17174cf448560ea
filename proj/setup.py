"""CMake-driven build of the _kikref extension (cmake_example pattern)."""

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
        ext_path = Path(self.get_ext_fullpath(ext.name)).resolve()
        package_dir = ext_path.parent
        package_dir.mkdir(parents=True, exist_ok=True)
        source_dir = Path(__file__).parent.resolve()
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        try:
            import pybind11

            pybind11_dir = pybind11.get_cmake_dir()
        except ImportError:
            pybind11_dir = ""

        cfg = "Debug" if self.debug else "Release"
        args = [
            "cmake",
            "-S", str(source_dir),
            "-B", str(build_dir),
            f"-DCMAKE_BUILD_TYPE={cfg}",
            "-DKIKREF_BUILD_TESTS=OFF",
            f"-DKIKREF_PYTHON_INSTALL_DIR={package_dir}",
            f"-DPython3_EXECUTABLE={sys.executable}",
        ]
        if pybind11_dir:
            args.append(f"-Dpybind11_DIR={pybind11_dir}")
        subprocess.run(args, check=True)
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_kikref",
             "--parallel", str(os.cpu_count() or 2)],
            check=True,
        )
        subprocess.run(
            ["cmake", "--install", str(build_dir)],
            check=False,
        )
        # cmake wrote the module next to its build tree targets; copy it in place
        import glob
        import shutil

        candidates = glob.glob(str(build_dir / "_kikref*.so")) + glob.glob(
            str(package_dir / "_kikref*.so")
        )
        if not candidates:
            raise RuntimeError("pybind11 module _kikref was not produced")
        built = Path(candidates[0])
        if built.resolve() != ext_path:
            shutil.copy2(built, ext_path)


setup(
    ext_modules=[CMakeExtension("kikref._kikref")],
    cmdclass={"build_ext": CMakeBuild},
)
