"""Parser, validator and grounding for a small AMPL subset.

Covers ``set``, ``param`` (scalar, 1-D, 2-D), ``var`` with bounds and
``integer``/``binary``, ``subject to``, ``maximize``/``minimize``, indexed
``sum`` and ``#`` comments, plus the matching ``.dat`` layouts.
"""
from .ast import AmplModelAst
from .data import DataSection, parse_data
from .errors import CompileError, render_compile_error
from .instance import ObjectivePolicy, Objective, ProblemInstance, Row, Variable, instantiate
from .model_parser import parse_model
from .render import render_model
from .semantics import ValidationReport, check_model, validate

__all__ = [
    "AmplModelAst",
    "CompileError",
    "DataSection",
    "Objective",
    "ObjectivePolicy",
    "ProblemInstance",
    "Row",
    "ValidationReport",
    "Variable",
    "check_model",
    "instantiate",
    "parse_data",
    "parse_model",
    "render_compile_error",
    "render_model",
    "validate",
]
