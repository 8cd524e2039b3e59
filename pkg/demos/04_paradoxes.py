"""
Paradoxes and action phases
===========================

Built-in pre- and post-selection scenarios whose weak values are negative
or complex, checked against a simulated weak measurement.
"""

import numpy as np

import weakprob as wp
from weakprob import scenarios

# %%
# The three-box and Hardy set-ups: a weak value of -1 appears in each
for name in ("three-box", "hardy"):
    sc = scenarios.get(name)
    report = scenarios.verify(sc, coupling=0.01)
    print(name, "passed:", report.passed)
    for e in report.entries:
        print(f"  {e.label:>5}: weak value {e.formula.real:+.3f}  simulated {e.simulated.real:+.4f}")

# %%
# A weak value of -1 carries an action phase of pi (times hbar)
sc = scenarios.three_box()
print("three-box action:", wp.action_phase(sc.pre_state, sc.post_state, sc.measured_basis[2]).value)

# %%
# Mutually unbiased qubit bases give phases of +/- pi/4, scaling with hbar
sc = scenarios.mub_qubit_phase()
for hbar in (1.0, 2.0):
    s = [wp.action_phase(sc.pre_state, sc.post_state, sc.measured_basis[i], hbar=hbar).value for i in range(2)]
    print(f"hbar={hbar}: phases / pi =", np.round(np.array(s) / np.pi, 6))
