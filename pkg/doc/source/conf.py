# -*- coding: utf-8 -*-
import os
import sys

sys.path.insert(0, os.path.abspath("../../"))

import alabaster

from reebrigidity import __author__, __package__
from reebrigidity._version import __version__

# -- General configuration ------------------------------------------------

extensions = [
    "alabaster",
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinx_copybutton",
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = __package__
copyright = "2026, " + __author__

version = __version__
release = __version__

exclude_patterns = []
pygments_style = "sphinx"

autodoc_member_order = "bysource"

# -- Options for HTML output ----------------------------------------------

html_theme = "alabaster"
html_theme_options = {
    "description": "Closed Reeb orbits under conformal rescaling",
    "travis_button": False,
}
html_theme_path = [alabaster.get_path()]
html_static_path = []
html_sidebars = {"**": ["about.html", "navigation.html", "searchbox.html"]}
html_show_sourcelink = False
htmlhelp_basename = "reebrigiditydoc"

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
    ("index", "reebrigidity.tex", "reebrigidity Documentation", __author__, "manual"),
]

man_pages = [("index", "reebrigidity", "reebrigidity documentation", [__author__], 1)]

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable", None),
    "scipy": ("https://docs.scipy.org/doc/scipy", None),
}
