#!/usr/bin/env python
#
# lrpossib documentation build configuration file.
import os
import sys

import msmb_theme  # noqa: F401
import sphinx_rtd_theme
from recommonmark.transform import AutoStructify

sys.path.insert(0, os.path.join(os.path.dirname(os.getcwd()), "src"))

import lrpossib  # noqa: E402


def setup(app):
    app.add_config_value(
        "recommonmark_config",
        {
            "auto_toc_tree_section": "Contents",
            "enable_math": True,
            "enable_inline_math": True,
            "enable_eval_rst": True,
        },
        True,
    )
    app.add_transform(AutoStructify)


extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.napoleon",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "recommonmark",
]
autosummary_generate = True
autodoc_default_options = {"members": True, "undoc-members": False}

source_suffix = [".rst", ".md"]
master_doc = "index"

project = "lrpossib"
copyright = "2026, lrpossib developers"
version = lrpossib.__version__
release = lrpossib.__version__

exclude_patterns = ["_build"]
pygments_style = "sphinx"

html_theme = "msmb_theme"
html_theme_options = {"collapse_navigation": False, "display_version": True}
html_theme_path = [msmb_theme.get_html_theme_path(), sphinx_rtd_theme.get_html_theme_path()]
htmlhelp_basename = "lrpossibdoc"
