"""prodsys - numerical toolkit for inclusion systems and amalgamated product systems."""
__version__ = "1.0.0"
