"""LTL formulas, Büchi translation and model checking."""
from .checker import (FormulaError, InvalidCounterexample, Verdict, check_atoms, check_structure, eval_atom,
                      model_check, validate_counterexample)
from .lasso import holds_on_lasso
from .syntax import (FALSE, TRUE, Always, And, Atom, Const, Eventually, Formula, FormulaSyntaxError, Implies,
                     Next, Not, Or, Release, Until, nnf, parse)

__all__ = [
    "Always", "And", "Atom", "Const", "Eventually", "FALSE", "Formula", "FormulaError", "FormulaSyntaxError",
    "Implies", "InvalidCounterexample", "Next", "Not", "Or", "Release", "TRUE", "Until", "Verdict",
    "check_atoms", "check_structure", "eval_atom", "holds_on_lasso", "model_check", "nnf", "parse",
    "validate_counterexample",
]
