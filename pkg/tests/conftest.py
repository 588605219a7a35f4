import os
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from incdeg import parse_constraints, parse_instance

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"

EXAMPLE1_FACTS = "P(a). P(e). Q(a,b). R(a,c).\n"
KAPPA = "dc k1: <- P(x), Q(x,y).\ndc k2: <- P(x), R(x,y).\n"


@pytest.fixture
def ex1():
    """Example 1: P(a)=1, P(e)=2, Q(a,b)=3, R(a,c)=4."""
    inst = parse_instance(EXAMPLE1_FACTS)
    return inst, parse_constraints(KAPPA, inst.schema)


@pytest.fixture
def ex4():
    """Same database with the tids used in the ASP example: P(e)=1 .. P(a)=4."""
    inst = parse_instance("P(e). Q(a,b). R(a,c). P(a).\n")
    return inst, parse_constraints(KAPPA, inst.schema)


@pytest.fixture
def ex3():
    inst = parse_instance("*P(a). *P(e). Q(a,b). R(a,c).\n")
    return inst, parse_constraints(KAPPA, inst.schema)


@pytest.fixture
def ex3_swapped():
    inst = parse_instance("*P(a). P(e). *Q(a,b). R(a,c).\n")
    return inst, parse_constraints(KAPPA, inst.schema)


def _find_solver():
    """(command template, dialect) from the environment, else a local clingo."""
    cmd = os.environ.get("INCDEG_SOLVER_CMD")
    if cmd:
        return cmd, os.environ.get("INCDEG_ASP_DIALECT", "dlv")
    if shutil.which("clingo"):
        return "clingo --opt-mode=optN -n 0 {file}", "clingo"
    probe = subprocess.run(
        [sys.executable, "-m", "clingo", "--version"], capture_output=True, check=False
    )
    if probe.returncode == 0:
        return f"{sys.executable} -m clingo --opt-mode=optN -n 0 {{file}}", "clingo"
    return None


@pytest.fixture(scope="session")
def solver():
    found = _find_solver()
    if found is None:
        pytest.skip("no ASP solver configured (set INCDEG_SOLVER_CMD)")
    return found
