"""Natural-language optimization problems to executable specifications, solved and scored."""

__version__ = "0.1.0"
