import math
from pathlib import Path

import numpy as np
import pytest

from weakprob import StateVector, haar_random_basis, random_density, validate_basis

FIXTURES = Path(__file__).parent / "fixtures" / "cli"
GOLDEN = Path(__file__).parent / "golden"

R = 1 / math.sqrt(2)


def brute_dot(x, y):
    """<x|y> by an explicit Python loop."""
    return sum(complex(xi).conjugate() * complex(yi) for xi, yi in zip(x, y))


def brute_sandwich(x, matrix, y):
    """<x|M|y> by explicit loops."""
    d = len(x)
    return sum(
        complex(x[i]).conjugate() * complex(matrix[i][j]) * complex(y[j])
        for i in range(d)
        for j in range(d)
    )


def brute_kd(rho, A, B):
    d = A.dim
    out = np.zeros((d, d), dtype=complex)
    for j in range(d):
        a = A.matrix[:, j]
        for k in range(d):
            b = B.matrix[:, k]
            out[j, k] = brute_dot(b, a) * brute_sandwich(a, rho.matrix, b)
    return out


def brute_weak_value(a, b, m):
    return brute_dot(b, m) * brute_dot(m, a) / brute_dot(b, a)


def brute_born(rho, M):
    return np.array([brute_sandwich(M.matrix[:, m], rho.matrix, M.matrix[:, m]).real for m in range(M.dim)])


def random_instance(seed, dim, n_bases=2):
    """Seeded (rho, bases...) with rho of random rank."""
    rank = 1 + seed % dim
    rho = random_density(dim, rank, 10_000 + seed)
    bases = [haar_random_basis(dim, 20_000 + 97 * seed + i, name=f"B{i}") for i in range(n_bases)]
    return (rho, *bases)


def min_overlap(A, B):
    return float(np.min(np.abs(A.matrix.conj().T @ B.matrix)))


@pytest.fixture
def z_basis():
    return validate_basis([[1, 0], [0, 1]], ["0", "1"], name="Z")


@pytest.fixture
def x_basis():
    return validate_basis([[R, R], [R, -R]], ["+", "-"], name="X")


@pytest.fixture
def y_basis():
    return validate_basis([[R, 1j * R], [R, -1j * R]], ["+i", "-i"], name="Y")


@pytest.fixture
def ket0():
    return StateVector([1, 0])


@pytest.fixture
def ket_plus():
    return StateVector([R, R])


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record a PASS/FAIL line for an acceptance criterion."""
    state = {"label": request.node.name, "detail": ""}

    def describe(label, detail=""):
        state["label"], state["detail"] = label, detail

    yield describe
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {state['label']}  {state['detail']}".rstrip())


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
