"""Decision procedures for unambiguous register automata over equality data,
via orbit counting and exact skew-polynomial algebra."""

__version__ = "0.1.0"
