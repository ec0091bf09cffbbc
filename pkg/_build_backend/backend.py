"""PEP 517 backend for this project.

The top-level ``setup.py`` is an environment bootstrap script (venv creation,
dependency install, test run), not a setuptools manifest. The stock setuptools
backend would execute it during ``pip install``; this wrapper delegates to
setuptools but takes all metadata from ``pyproject.toml`` instead.
"""

import setuptools
from setuptools import build_meta as _orig


class _Backend(_orig._BuildMetaBackend):
    def run_setup(self, setup_script="setup.py"):
        setuptools.setup()


_backend = _Backend()

get_requires_for_build_wheel = _backend.get_requires_for_build_wheel
get_requires_for_build_sdist = _backend.get_requires_for_build_sdist
get_requires_for_build_editable = _backend.get_requires_for_build_editable
prepare_metadata_for_build_wheel = _backend.prepare_metadata_for_build_wheel
prepare_metadata_for_build_editable = _backend.prepare_metadata_for_build_editable
build_wheel = _backend.build_wheel
build_sdist = _backend.build_sdist
build_editable = _backend.build_editable
