"""Exact maximisation of piecewise-linear exponent programs."""

from .expr import Constraint, Guarded, Lin, LinForm, Max, Min, PiecewiseProgram
from .optimize import OptResult, load_program, maximize, probe_check, program_text, verify_certificate, SHIPPED
from .optimize import verdict, verdict_bound
from .parser import format_program, parse_expr, parse_program

__all__ = [
    "Constraint", "Guarded", "Lin", "LinForm", "Max", "Min", "PiecewiseProgram",
    "OptResult", "load_program", "maximize", "probe_check", "program_text", "verify_certificate", "SHIPPED", "verdict", "verdict_bound",
    "format_program", "parse_expr", "parse_program",
]
