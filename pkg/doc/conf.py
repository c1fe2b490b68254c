# Sphinx configuration for the pyva documentation.

import os
import pathlib
import shutil
import sys

import sphinx.ext.apidoc

HERE = pathlib.Path(__file__).parent
SRC = HERE.parent / "src"

sys.path.insert(0, str(HERE))
sys.path.insert(0, str(SRC))

project = "pyva"
copyright = "2024, the pyva developers"
author = "the pyva developers"

# -- API reference, regenerated on every build -------------------------------

api_dir = HERE / "api"
shutil.rmtree(api_dir, ignore_errors=True)
api_dir.mkdir()
(HERE / "API.rst").write_text(
    "=============================\n"
    "Reference: Code Documentation\n"
    "=============================\n"
    "Every module of ``pyva``, generated from the docstrings.\n\n"
    ".. toctree::\n"
    "   :glob:\n\n"
    "   api/*\n"
)
sphinx.ext.apidoc.main(["--no-toc", "--module-first", "--output-dir", str(api_dir), str(SRC / "pyva")])

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosectionlabel",
    "sphinx.ext.intersphinx",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
    "sphinx_copybutton",
    "sphinx_click",
    "everett.sphinxext",
    "cerberus_sphinx_ext",
]

autosectionlabel_prefix_document = True
autodoc_member_order = "bysource"

copybutton_prompt_text = r">>> |\.\.\. |\$ "
copybutton_prompt_is_regexp = True

templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

intersphinx_mapping = {
    "python": ("https://docs.python.org/3/", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
    "pandas": ("https://pandas.pydata.org/docs/", None),
    "xarray": ("https://docs.xarray.dev/en/stable/", None),
    "arviz": ("https://python.arviz.org/en/stable/", None),
    "cerberus": ("https://docs.python-cerberus.org/", None),
    "everett": ("https://everett.readthedocs.io/en/latest/", None),
}

# -- HTML output -------------------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_static_path = ["_static"] if os.path.isdir(HERE / "_static") else []
