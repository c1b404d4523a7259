"""fmlab: a workbench for first-order logic with built-in numerical
relations and generalized quantifiers on finite ordered structures."""

__version__ = "0.1.0"
