"""pldiag: a pure-Prolog interpreter with an exact Byrd four-port tracer and
declarative diagnosis of incorrectness and incompleteness errors."""

from .engine import Budget, solve, tp_oracle
from .syntax import parse_program, parse_query, parse_term, term_text

__all__ = [
    "Budget",
    "solve",
    "tp_oracle",
    "parse_program",
    "parse_query",
    "parse_term",
    "term_text",
]

__version__ = "0.1.0"
