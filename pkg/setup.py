import io
import os
import re

from setuptools import find_packages, setup


def read(filename):
    filename = os.path.join(os.path.dirname(__file__), filename)
    text_type = type("")
    with io.open(filename, mode="r", encoding="utf-8") as fd:
        return re.sub(text_type(r":[a-z]+:`~?(.*?)`"), text_type(r"``\1``"), fd.read())


def version():
    scope = {}
    exec(read("src/pyva/_version.py"), scope)
    return scope["version_json"]["version"]


docs_require = read("doc/requirements.txt").splitlines()


setup(
    name="pyva",
    python_requires=">=3.9, <4",
    version=version(),
    license="MIT",
    description="Cause-of-death coding for verbal autopsy data",
    long_description=read("README.rst"),
    long_description_content_type="text/x-rst",
    package_dir={"": "src"},
    packages=find_packages(where="src", exclude=("tests",)),
    # NOTE: Please keep this list sorted! In vim, you can use
    # visual-block mode (Ctrl-V) to select the lines and then `:sort`.
    install_requires=[
        "arviz",
        "cerberus",
        "click-loguru",
        "dpath",
        "everett[yaml]",
        "joblib",
        "matplotlib",
        "numpy",
        "pandas",
        "pendulum",
        "pyyaml",
        "randomname",
        "requests",
        "rich",
        "rich-click",
        "scipy",
        "xarray",
    ],
    extras_require={
        "dev": [
            "black",
            "flake8",
            "isort",
            "pre-commit",
            "pytest",
            "pytest-cov",
            "pytest-mock",
            "pytest-xdist",
            "sphinx",
            "sphinx_rtd_theme",
            "yamllint",
        ],
        "doc": docs_require,
    },
    entry_points={
        "console_scripts": [
            "va=pyva.cli:main",
            "pyva=pyva.cli:main",
        ],
    },
    include_package_data=True,
    package_data={
        "pyva": ["data/*.yaml", "data/*.csv", "data/phmrc/*.csv", "data/phmrc/*.yaml"],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering",
        "Topic :: Scientific/Engineering :: Medical Science Apps.",
    ],
)
