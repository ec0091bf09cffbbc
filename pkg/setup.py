#!/usr/bin/env python3
"""
Setup script for the Soil Mapping Pipeline.

Creates the virtual environment, installs dependencies, prepares the working
directories and copies the run configuration template.
"""

import os
import sys
import subprocess
import platform
from pathlib import Path

CONFIG_FILE = Path("config") / "soilmap.env"
CONFIG_TEMPLATE = Path("config") / "soilmap.env.example"


def run_command(command, check=True):
    """Run a shell command and return the result."""
    try:
        result = subprocess.run(command, shell=True, check=check,
                                capture_output=True, text=True)
        return result
    except subprocess.CalledProcessError as e:
        print(f"Error running command: {command}")
        print(f"Error output: {e.stderr}")
        return None


def get_venv_executable(name):
    """Path of an executable inside the virtual environment."""
    if platform.system() == "Windows":
        return f"venv\\Scripts\\{name}.exe"
    return f"venv/bin/{name}"


def create_virtual_environment():
    """Create a Python virtual environment."""
    print("Creating virtual environment...")

    if Path("venv").exists():
        print("Virtual environment already exists.")
        return True

    # Wrap sys.executable in quotes to handle spaces in path
    result = run_command(f'"{sys.executable}" -m venv venv')
    if result is None:
        print("Failed to create virtual environment.")
        return False

    print("Virtual environment created successfully.")
    return True


def install_dependencies():
    """Install the numerical stack and test tooling from requirements.txt."""
    print("Installing dependencies...")

    pip_cmd = get_venv_executable("pip")
    if run_command(f"{pip_cmd} install --upgrade pip") is None:
        print("Failed to upgrade pip.")
        return False

    proxy = os.environ.get("HTTP_PROXY") or os.environ.get("http_proxy")
    proxy_arg = f'--proxy={proxy} ' if proxy else ''

    result = run_command(
        f'{pip_cmd} install -r requirements.txt '
        f'{proxy_arg}'
        '--disable-pip-version-check '
        '--timeout 100'
    )
    if result is None:
        print("Failed to install dependencies.")
        if not proxy:
            print("If you are behind a proxy, set HTTP_PROXY/HTTPS_PROXY and try again.")
        return False

    print("Dependencies installed successfully.")
    return True


def create_directories():
    """Create the input, output and log directories."""
    for directory in ("data", "logs", "output", "config"):
        Path(directory).mkdir(parents=True, exist_ok=True)

    print("All directories created.")


def check_config_file():
    """Copy the run configuration template if no config file exists yet."""
    if not CONFIG_FILE.exists() and CONFIG_TEMPLATE.exists():
        print(f"Creating {CONFIG_FILE} from template...")
        CONFIG_FILE.write_text(CONFIG_TEMPLATE.read_text())
        print(f"Created {CONFIG_FILE}. Point 'manifest' at your dataset manifest and set a seed.")
    elif CONFIG_FILE.exists():
        print(f"{CONFIG_FILE} already exists.")
    else:
        print(f"Warning: neither {CONFIG_FILE} nor {CONFIG_TEMPLATE} found.")


def run_tests():
    """Import the pipeline and run the fast test suite."""
    print("Running tests...")

    python_cmd = get_venv_executable("python")
    result = run_command(f'{python_cmd} -c "from src.workflow import SoilMapPipeline"', check=False)
    if result is None or result.returncode != 0:
        print("✗ Failed to import the pipeline modules.")
        return False
    print("✓ Pipeline modules can be imported successfully.")

    result = run_command(f'{python_cmd} -m pytest tests/ -m "not slow"', check=False)
    if result and result.returncode == 0:
        print("✓ All tests passed.")
    else:
        print("Some tests failed or pytest not available.")

    return True


def main():
    """Main setup function."""
    print("=== Soil Mapping Pipeline Setup ===")
    print()

    if sys.version_info < (3, 9):
        print("Error: Python 3.9 or higher is required.")
        sys.exit(1)

    print(f"Python version: {sys.version}")
    print()

    create_directories()
    check_config_file()

    if not create_virtual_environment():
        sys.exit(1)

    if not install_dependencies():
        sys.exit(1)

    run_tests()

    print()
    print("=== Setup Complete ===")
    print()
    print("Next steps:")
    print(f"1. Edit {CONFIG_FILE} (manifest path, seed, thread count)")
    print("2. Activate the virtual environment:")
    if platform.system() == "Windows":
        print("   venv\\Scripts\\activate")
    else:
        print("   source venv/bin/activate")
    print(f"3. Fit an ensemble: python soilmap_cli.py select --config {CONFIG_FILE}")
    print()


if __name__ == "__main__":
    main()
