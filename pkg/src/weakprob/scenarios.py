"""Pre/post-selection fixtures with negative and complex weak values.

Expected weak values are stored as exact fractions and converted to floats
on load, so that they never come from the code they are used to check.
"""

from dataclasses import dataclass
from fractions import Fraction as F
import math

import numpy as np

from . import kdq
from .errors import WeakProbError
from .linalg import OrthonormalBasis, StateVector, density_from_pure
from .weaksim import MeterConfig, estimate_weak_value

FORMULA_TOL = 1e-12
SIMULATION_TOL = 0.1


def _exact(pairs):
    return np.array([complex(float(re), float(im)) for re, im in pairs])


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    pre_state: StateVector
    post_state: StateVector
    measured_basis: OrthonormalBasis
    expected_weak_values: np.ndarray
    provenance_note: str
    expected_phases: tuple = ()  # in units of hbar, None where undefined

    @property
    def dim(self):
        return self.pre_state.dim


def three_box():
    s = 1 / math.sqrt(3)
    return Scenario(
        name="three-box",
        pre_state=StateVector(np.array([s, s, s])),
        post_state=StateVector(np.array([s, s, -s])),
        measured_basis=OrthonormalBasis(np.eye(3), ("box1", "box2", "box3"), name="boxes"),
        expected_weak_values=_exact([(F(1), F(0)), (F(1), F(0)), (F(-1), F(0))]),
        provenance_note=(
            "pre (|1>+|2>+|3>)/sqrt3, post (|1>+|2>-|3>)/sqrt3: <post|pre> = 1/3; "
            "numerators <post|i><i|pre> = (1/3, 1/3, -1/3) give weak values (1, 1, -1)"
        ),
        expected_phases=(0.0, 0.0, math.pi),
    )


def hardy():
    s = 1 / math.sqrt(3)
    labels = ("NN", "NO", "ON", "OO")
    return Scenario(
        name="hardy",
        pre_state=StateVector(np.array([s, s, s, 0.0])),
        post_state=StateVector(np.array([0.5, -0.5, -0.5, 0.5])),
        measured_basis=OrthonormalBasis(np.eye(4), labels, name="hardy-product"),
        expected_weak_values=_exact([(F(-1), F(0)), (F(1), F(0)), (F(1), F(0)), (F(0), F(0))]),
        provenance_note=(
            "pre (|NN>+|NO>+|ON>)/sqrt3, post (|N>-|O>)(x)(|N>-|O>)/2: <post|pre> = -1/(2 sqrt3); "
            "numerators (1, -1, -1, 0)/(2 sqrt3) give weak values (-1, 1, 1, 0)"
        ),
        expected_phases=(math.pi, 0.0, 0.0, None),
    )


def mub_qubit_phase():
    r = 1 / math.sqrt(2)
    y_basis = OrthonormalBasis(np.array([[r, r], [1j * r, -1j * r]]), ("+i", "-i"), name="Y")
    return Scenario(
        name="mub-qubit",
        pre_state=StateVector(np.array([1.0, 0.0])),
        post_state=StateVector(np.array([r, r])),
        measured_basis=y_basis,
        expected_weak_values=_exact([(F(1, 2), F(1, 2)), (F(1, 2), F(-1, 2))]),
        provenance_note=(
            "pre |0>, post |+>, measured Y eigenbasis m+- = (|0> +- i|1>)/sqrt2: "
            "<+|m+-> = (1 +- i)/2, <m+-|0> = 1/sqrt2, <+|0> = 1/sqrt2 give (1 +- i)/2; Arg = +-pi/4"
        ),
        expected_phases=(math.pi / 4, -math.pi / 4),
    )


SCENARIOS = {
    "three-box": three_box,
    "hardy": hardy,
    "mub-qubit": mub_qubit_phase,
}


def get(name):
    try:
        return SCENARIOS[name]()
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; available: {', '.join(SCENARIOS)}") from None


@dataclass(frozen=True)
class EntryReport:
    label: str
    expected: complex
    formula: complex
    formula_deviation: float
    simulated: complex
    simulation_deviation: float
    formula_ok: bool
    simulation_ok: bool

    @property
    def passed(self):
        return self.formula_ok and self.simulation_ok


@dataclass(frozen=True)
class ScenarioReport:
    name: str
    coupling: float
    entries: tuple
    expected_sum: complex

    @property
    def passed(self):
        return all(e.passed for e in self.entries)

    @property
    def failures(self):
        return [e.label for e in self.entries if not e.passed]


def verify(scenario, coupling=0.01, formula_tol=FORMULA_TOL, simulation_tol=SIMULATION_TOL):
    """Recompute every expected weak value by formula and by simulation.

    Errors raised while recomputing an entry mark that entry failed rather
    than aborting the report.
    """
    cfg = MeterConfig(coupling=coupling, mode="exact")
    rho = density_from_pure(scenario.pre_state)
    basis = scenario.measured_basis
    entries = []
    for i, label in enumerate(basis.labels):
        expected = complex(scenario.expected_weak_values[i])
        try:
            formula = kdq.conditional_weak_value(scenario.pre_state, scenario.post_state, basis[i])
        except WeakProbError:
            formula = complex("nan")
        try:
            simulated = estimate_weak_value(rho, i, basis, scenario.post_state, cfg).value
        except WeakProbError:
            simulated = complex("nan")
        f_dev = abs(formula - expected)
        s_dev = abs(simulated - expected)
        entries.append(
            EntryReport(
                label=label,
                expected=expected,
                formula=formula,
                formula_deviation=f_dev,
                simulated=simulated,
                simulation_deviation=s_dev,
                formula_ok=bool(f_dev <= formula_tol),
                simulation_ok=bool(s_dev <= simulation_tol),
            )
        )
    return ScenarioReport(
        name=scenario.name,
        coupling=cfg.coupling,
        entries=tuple(entries),
        expected_sum=complex(np.sum(scenario.expected_weak_values)),
    )
