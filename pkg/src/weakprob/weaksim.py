"""Von Neumann weak measurement of a projector with a qubit meter.

The system is coupled to a meter qubit prepared in ``|0>`` through

    U = exp(-i g  P_a (x) Y) = (1 - P_a) (x) 1 + P_a (x) (cos g - i sin g Y)

with ``P_a = |a><a|``.  After post-selecting the system on ``|b>``, the
meter holds ``|0> + g W |1> + O(g^2)`` (up to normalization), where ``W`` is
the weak value of ``P_a``.  Reading ``<X> + i<Y>`` on the meter and dividing
by ``2g`` therefore estimates ``W`` with an O(g^2) bias.  No higher-order
correction is applied.

Multiplying ``W`` by the post-selection probability ``<b|rho|b>`` gives the
Kirkwood-Dirac entry ``rho(a, b)``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .config import resolve
from .errors import (
    DimensionMismatch,
    InputError,
    InvalidCoupling,
    PostselectionImpossible,
    ShotBudgetZero,
)
from .linalg import DensityOperator, SeededStream

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

MODES = ("exact", "sampled")


@dataclass(frozen=True)
class MeterConfig:
    """Weak-measurement settings.

    coupling
        Conditional meter rotation angle ``g`` in radians, ``0 < g < pi/2``.
    mode
        ``"exact"`` reads meter expectation values directly; ``"sampled"``
        draws ``shots`` projective meter readouts per estimate.
    """

    coupling: float = 0.01
    mode: str = "exact"
    shots: int = 100_000
    seed: int = 0

    def __post_init__(self):
        g = float(self.coupling)
        if not (0.0 < g < math.pi / 2):
            raise InvalidCoupling(f"coupling must satisfy 0 < g < pi/2, got {self.coupling!r}")
        if self.mode not in MODES:
            raise InputError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "sampled":
            if int(self.shots) < 2:
                raise ShotBudgetZero(f"sampled mode needs at least 2 shots (one per quadrature), got {self.shots}")
        object.__setattr__(self, "coupling", g)
        object.__setattr__(self, "shots", int(self.shots))


@dataclass(frozen=True)
class WeakValueEstimate:
    value: complex
    std_error_re: float
    std_error_im: float
    postselect_probability: float
    shots_used: int


@dataclass(frozen=True, eq=False)
class KDEstimate:
    """Simulated KD distribution with per-cell standard errors.

    ``null_cells`` marks post-selections with probability below the floor;
    their values are exact zeros.
    """

    values: np.ndarray
    std_errors_re: np.ndarray
    std_errors_im: np.ndarray
    postselect_probabilities: np.ndarray
    basis_a_id: str
    basis_b_id: str
    config: MeterConfig
    null_cells: np.ndarray = field(default=None)

    @property
    def dim(self):
        return self.values.shape[0]

    @property
    def std_errors(self):
        return np.hypot(self.std_errors_re, self.std_errors_im)

    @property
    def total(self):
        return complex(self.values.sum())


def coupling_unitary(projector, g):
    """``exp(-i g P (x) Y)`` in closed form (system (x) meter ordering)."""
    d = projector.shape[0]
    ident = np.eye(d, dtype=np.complex128)
    rot = math.cos(g) * np.eye(2) - 1j * math.sin(g) * PAULI_Y
    return np.kron(ident - projector, np.eye(2)) + np.kron(projector, rot)


def _rho_matrix(rho):
    return rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=np.complex128)


def couple_and_postselect(rho, a_index, A, b, g, tol=None):
    """Couple, post-select the system on ``b`` and return the meter.

    Returns
    -------
    meter : DensityOperator
        Normalized 2x2 post-selected meter state.
    probability : float
        Post-selection probability (trace before normalization).

    Raises
    ------
    PostselectionImpossible
        If the post-selection probability is below ``tol.postselect_floor``.
    """
    tol = resolve(tol)
    if not (0.0 < g < math.pi / 2):
        raise InvalidCoupling(f"coupling must satisfy 0 < g < pi/2, got {g!r}")
    r = _rho_matrix(rho)
    bvec = np.asarray(b, dtype=np.complex128)
    d = r.shape[0]
    if A.dim != d or bvec.shape[0] != d:
        raise DimensionMismatch(f"dimension mismatch: rho {d}, basis {A.dim}, b {bvec.shape[0]}")
    u = coupling_unitary(A.projector(a_index), g)
    meter0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
    joint = u @ np.kron(r, meter0) @ u.conj().T
    joint = joint.reshape(d, 2, d, 2)
    meter = np.einsum("s,smtn,t->mn", bvec.conj(), joint, bvec)
    prob = float(np.trace(meter).real)
    if prob < tol.postselect_floor:
        raise PostselectionImpossible(f"post-selection probability {prob:.3e} is too small")
    meter = meter / prob
    meter = 0.5 * (meter + meter.conj().T)
    return DensityOperator(meter), prob


def _quadrature(p_plus, n, stream):
    """Mean and sample standard error of ``n`` +/-1 readouts."""
    u = stream.uniform(n)
    hits = int(np.count_nonzero(u < p_plus))
    mean = (2 * hits - n) / n
    if n < 2:
        return mean, 1.0
    var = max(0.0, 1.0 - mean * mean) * n / (n - 1)
    return mean, math.sqrt(var / n)


def _read_meter(meter, cfg, stream):
    m = meter.matrix
    ex = float(np.real(np.trace(m @ PAULI_X)))
    ey = float(np.real(np.trace(m @ PAULI_Y)))
    scale = 1.0 / (2.0 * cfg.coupling)
    if cfg.mode == "exact":
        return complex(ex, ey) * scale, 0.0, 0.0, 0
    n_y = cfg.shots // 2
    n_x = cfg.shots - n_y
    mx, sx = _quadrature(min(1.0, max(0.0, 0.5 * (1 + ex))), n_x, stream)
    my, sy = _quadrature(min(1.0, max(0.0, 0.5 * (1 + ey))), n_y, stream)
    return complex(mx, my) * scale, sx * scale, sy * scale, cfg.shots


def _estimate(rho, a_index, A, b, cfg, stream, tol):
    r = _rho_matrix(rho)
    bvec = np.asarray(b, dtype=np.complex128)
    if bvec.shape[0] != r.shape[0]:
        raise DimensionMismatch(f"dimension mismatch: rho {r.shape[0]}, b {bvec.shape[0]}")
    p_b = float(np.real(np.vdot(bvec, r @ bvec)))
    if p_b < tol.postselect_min:
        raise PostselectionImpossible(f"<b|rho|b> = {p_b:.3e} is below {tol.postselect_min:.1e}")
    meter, prob = couple_and_postselect(r, a_index, A, bvec, cfg.coupling, tol)
    value, se_re, se_im, used = _read_meter(meter, cfg, stream)
    return WeakValueEstimate(value, se_re, se_im, prob, used)


def estimate_weak_value(rho, a_index, A, b, cfg, tol=None):
    """Weak value of ``|a><a|`` (``a = A[a_index]``) with post-selection ``b``.

    For a mixed pre-selection the target is ``tr(P_b P_a rho) / tr(P_b rho)``.
    In sampled mode the meter is read ``shots // 2`` times in the Y basis and
    the rest in the X basis; standard errors are propagated through the
    ``1/(2g)`` scaling.
    """
    tol = resolve(tol)
    return _estimate(rho, a_index, A, b, cfg, SeededStream(cfg.seed), tol)


def estimate_kd(rho, A, B, cfg, tol=None):
    """Simulated KD distribution: weak value times post-selection probability.

    Each cell (j, k) draws from its own stream keyed by ``(seed, j, k)`` so
    results do not depend on evaluation order.
    """
    tol = resolve(tol)
    r = _rho_matrix(rho)
    d = A.dim
    if B.dim != d or r.shape[0] != d:
        raise DimensionMismatch(f"dimension mismatch: rho {r.shape[0]}, A {A.dim}, B {B.dim}")
    values = np.zeros((d, d), dtype=np.complex128)
    se_re = np.zeros((d, d))
    se_im = np.zeros((d, d))
    null = np.zeros((d, d), dtype=bool)
    p_post = np.array([float(np.real(np.vdot(B.matrix[:, k], r @ B.matrix[:, k]))) for k in range(d)])
    for k in range(d):
        if p_post[k] < tol.postselect_min:
            # rho >= 0 and <b|rho|b> = 0 imply rho|b> = 0, so the KD entry is 0
            null[:, k] = True
            continue
        for j in range(d):
            est = _estimate(r, j, A, B.matrix[:, k], cfg, SeededStream(cfg.seed, j, k), tol)
            values[j, k] = est.value * p_post[k]
            se_re[j, k] = est.std_error_re * p_post[k]
            se_im[j, k] = est.std_error_im * p_post[k]
    return KDEstimate(values, se_re, se_im, p_post, A.name, B.name, cfg, null)


def generalized_weak_value(rho, a, b):
    """Reference value ``tr(P_b P_a rho) / tr(P_b rho)``."""
    r = _rho_matrix(rho)
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    return complex(np.vdot(b, a) * np.vdot(a, r @ b)) / float(np.real(np.vdot(b, r @ b)))
