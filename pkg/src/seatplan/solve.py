"""One entry point for all four problems."""

from __future__ import annotations

from .efa import efa_select, efa_solve
from .esa import esa_select, esa_solve
from .model import Instance
from .mua import mua_select, mua_solve
from .mwa import mwa_select, mwa_solve
from .oracle import PROBLEMS, DispatchError, SolveOutcome, SolverConfig

_SOLVE = {"mwa": mwa_solve, "mua": mua_solve, "efa": efa_solve, "esa": esa_solve}
_SELECT = {"mwa": mwa_select, "mua": mua_select, "efa": efa_select, "esa": esa_select}


def _problem(problem: str) -> str:
    p = problem.lower()
    if p not in PROBLEMS:
        raise DispatchError(f"unknown problem {problem!r}; choose from {', '.join(PROBLEMS)}")
    return p


def solve(problem: str, inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    return _SOLVE[_problem(problem)](inst, config)


def select(problem: str, inst: Instance, config: SolverConfig = SolverConfig()) -> str:
    """Algorithm the automatic dispatcher would use."""
    return _SELECT[_problem(problem)](inst, config)
