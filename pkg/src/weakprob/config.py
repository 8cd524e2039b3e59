"""Numerical tolerances used across the package.

Every comparison against a tolerance goes through a :class:`Tolerances`
record so that callers can tighten or relax checks in one place.
"""

from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # core-linalg invariants
    unit_norm: float = 1e-10
    hermitian: float = 1e-10
    trace: float = 1e-10
    psd: float = 1e-9  # smallest eigenvalue must be >= -psd
    orthonormal: float = 1e-10

    # Kirkwood-Dirac calculus
    kd_sum: float = 1e-10
    marginal_imag: float = 1e-10
    kernel_sum: float = 1e-9
    prediction: float = 1e-9
    overlap_floor: float = 1e-8
    conditioning_warning: float = 1e-3
    magnitude_floor: float = 1e-12

    # weak-measurement simulator
    postselect_floor: float = 1e-14
    postselect_min: float = 1e-10

    def replace(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return asdict(self)


DEFAULT = Tolerances()


def resolve(tol):
    return DEFAULT if tol is None else tol
