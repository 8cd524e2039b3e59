"""Kirkwood-Dirac joint quasiprobabilities and complex conditional probabilities.

Index conventions
-----------------
``KDDistribution.values[j, k]`` is the joint quasiprobability of outcome
``a_j`` of the weakly measured basis A and outcome ``b_k`` of the
post-selected basis B::

    rho(a, b) = <b|a> <a|rho|b>

``ConditionalKernel.values[m, j, k]`` is the weak value of ``|m><m|`` for
pre-selection ``a_j`` and post-selection ``b_k``::

    p(m | a, b) = <b|m> <m|a> / <b|a>

Summing ``rho(a, b) p(m | a, b)`` over ``(a, b)`` gives the Born probability
of ``m``, and summing over ``b`` only gives ``rho(a, m)``.
"""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from .config import resolve
from .errors import (
    BasisMismatch,
    ConditioningWarning,
    DimensionMismatch,
    ImaginaryLeak,
    InputError,
    InvalidState,
    NormalizationError,
    NotPhysical,
    OverlapTooSmall,
    UndefinedCells,
    ZeroWeakValue,
)
from .linalg import DensityOperator, hermiticity_deviation

__all__ = [
    "KDDistribution",
    "ConditionalKernel",
    "ActionPhase",
    "overlap_matrix",
    "kd_distribution",
    "reconstruct_density",
    "marginals",
    "conditional_weak_value",
    "conditional_kernel",
    "predict_probabilities",
    "transform_representation",
    "invert_transform",
    "action_phase",
    "principal_arg",
]


@dataclass(frozen=True, eq=False)
class KDDistribution:
    """Complex joint quasiprobability over two bases.

    Construction only checks shape and finiteness; producers call
    :meth:`validate` with the tolerance appropriate to their arithmetic.
    """

    values: np.ndarray
    basis_a_id: str
    basis_b_id: str
    labels_a: tuple = ()
    labels_b: tuple = ()

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1] or vals.shape[0] == 0:
            raise DimensionMismatch(f"KD values must be a non-empty square matrix, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise InputError("KD values contain NaN or Inf")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        dim = vals.shape[0]
        for attr in ("labels_a", "labels_b"):
            labels = tuple(getattr(self, attr)) or tuple(str(j) for j in range(dim))
            if len(labels) != dim:
                raise DimensionMismatch(f"{attr} has {len(labels)} entries for dim {dim}")
            object.__setattr__(self, attr, labels)

    @property
    def dim(self):
        return self.values.shape[0]

    @property
    def total(self):
        return complex(self.values.sum())

    def validate(self, atol=None):
        """Check normalization and the reality/range of row and column sums."""
        atol = resolve(None).kd_sum if atol is None else atol
        total = self.total
        if abs(total - 1.0) > atol:
            raise NormalizationError(f"KD entries sum to {total!r}, expected 1")
        for axis, name in ((1, "row"), (0, "column")):
            sums = self.values.sum(axis=axis)
            leak = float(np.max(np.abs(sums.imag)))
            if leak > atol:
                raise ImaginaryLeak(f"KD {name} sums have imaginary part {leak:.3e}")
            if np.any(sums.real < -atol) or np.any(sums.real > 1 + atol):
                raise NormalizationError(f"KD {name} sums outside [0, 1]: {sums.real}")
        return self

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


@dataclass(frozen=True, eq=False)
class ConditionalKernel:
    """``p(m | a_j, b_k)`` stored as ``values[m, j, k]``.

    Cells with ``|<b_k|a_j>|`` below the overlap floor are undefined: they
    hold 0 and are ``False`` in ``defined_mask``.
    """

    values: np.ndarray
    defined_mask: np.ndarray
    basis_a_id: str
    basis_b_id: str
    basis_m_id: str
    labels_m: tuple = ()

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        mask = np.array(self.defined_mask, dtype=bool, copy=True)
        d = vals.shape[0]
        if vals.shape != (d, d, d) or mask.shape != (d, d):
            raise DimensionMismatch(f"kernel shape {vals.shape} / mask shape {mask.shape} inconsistent")
        vals.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "defined_mask", mask)
        if not self.labels_m:
            object.__setattr__(self, "labels_m", tuple(str(m) for m in range(d)))

    @property
    def dim(self):
        return self.values.shape[0]

    @property
    def fully_defined(self):
        return bool(self.defined_mask.all())

    def undefined_cells(self):
        return [tuple(int(i) for i in c) for c in np.argwhere(~self.defined_mask)]

    def completeness_error(self):
        """Largest ``|sum_m p(m|a,b) - 1|`` over defined cells."""
        sums = self.values.sum(axis=0)
        if not self.defined_mask.any():
            return 0.0
        return float(np.max(np.abs(sums[self.defined_mask] - 1.0)))


@dataclass(frozen=True)
class ActionPhase:
    """``S = hbar * Arg p(m|a,b)`` with the principal branch (-pi, pi]."""

    value: float
    hbar: float = 1.0
    weak_value: complex = field(default=0j, compare=False)

    @property
    def phase(self):
        return self.value / self.hbar


def _check_same_dim(*objs):
    dims = {o.dim for o in objs}
    if len(dims) != 1:
        raise DimensionMismatch(f"dimension mismatch: {sorted(dims)}")


def overlap_matrix(A, B):
    """``O[j, k] = <b_k|a_j>``."""
    _check_same_dim(A, B)
    return (A.matrix.conj().T @ B.matrix).conj()


def kd_distribution(rho, A, B):
    """Kirkwood-Dirac distribution of ``rho`` over the pair (A, B).

    Parameters
    ----------
    rho : DensityOperator
    A : OrthonormalBasis
        Weakly measured basis (first index).
    B : OrthonormalBasis
        Post-selected basis (second index).

    Returns
    -------
    KDDistribution
        ``values[j, k] = <b_k|a_j> <a_j|rho|b_k>``.
    """
    _check_same_dim(rho, A, B)
    ua, ub = A.matrix, B.matrix
    sandwich = ua.conj().T @ rho.matrix @ ub
    values = overlap_matrix(A, B) * sandwich
    kd = KDDistribution(values, A.name, B.name, A.labels, B.labels)
    return kd.validate(resolve(None).kd_sum)


def _check_tags(kd, A, B):
    if kd.basis_a_id != A.name or kd.basis_b_id != B.name:
        raise BasisMismatch(
            f"KD distribution is tagged ({kd.basis_a_id!r}, {kd.basis_b_id!r}) "
            f"but bases ({A.name!r}, {B.name!r}) were given"
        )


def reconstruct_density(kd, A, B, tol=None):
    """Invert :func:`kd_distribution`.

    Computes ``sum_{j,k} rho(a_j, b_k) |a_j><b_k| / <b_k|a_j>``, then
    symmetrizes.  The Hermiticity deviation before symmetrization is kept on
    the result as ``hermiticity_deviation``.  Eigenvalues are not clipped.

    Raises
    ------
    OverlapTooSmall
        Some ``|<b_k|a_j>|`` is below ``tol.overlap_floor``.
    NotPhysical
        The reconstruction is not a valid density operator (only possible
        for KD data that did not come from a state).
    """
    tol = resolve(tol)
    _check_same_dim(kd, A, B)
    _check_tags(kd, A, B)
    overlaps = overlap_matrix(A, B)
    mags = np.abs(overlaps)
    j, k = np.unravel_index(int(np.argmin(mags)), mags.shape)
    if mags[j, k] < tol.overlap_floor:
        raise OverlapTooSmall(
            f"|<b_{B.labels[k]}|a_{A.labels[j]}>| = {mags[j, k]:.3e} is below the overlap floor "
            f"{tol.overlap_floor:.1e} for pair ({A.labels[j]!r}, {B.labels[k]!r})",
            pair=(int(j), int(k)),
            overlap=float(mags[j, k]),
        )
    if mags[j, k] < tol.conditioning_warning:
        warnings.warn(
            f"minimum basis overlap {mags[j, k]:.3e} < {tol.conditioning_warning:.1e}; "
            "reconstruction amplifies errors by its inverse",
            ConditioningWarning,
            stacklevel=2,
        )
    raw = A.matrix @ (kd.values / overlaps) @ B.matrix.conj().T
    deviation = hermiticity_deviation(raw)
    sym = 0.5 * (raw + raw.conj().T)
    try:
        return DensityOperator(sym, tol=tol, hermiticity_deviation=deviation)
    except InvalidState as exc:
        raise NotPhysical(f"reconstructed operator is not a state: {exc}") from exc


def marginals(kd, tol=None):
    """Born marginals ``(p(a), p(b))`` of a KD distribution.

    Raises ImaginaryLeak when a row or column sum has an imaginary part of
    at least ``tol.marginal_imag``.
    """
    tol = resolve(tol)
    out = []
    for axis, name in ((1, "a"), (0, "b")):
        sums = kd.values.sum(axis=axis)
        leak = float(np.max(np.abs(sums.imag)))
        if leak >= tol.marginal_imag:
            raise ImaginaryLeak(f"{name}-marginal has imaginary part {leak:.3e}")
        out.append(sums.real.copy())
    return out[0], out[1]


def conditional_weak_value(a, b, m, tol=None):
    """Complex conditional probability ``p(m|a,b) = <b|m><m|a>/<b|a>``."""
    tol = resolve(tol)
    a, b, m = (np.asarray(v) for v in (a, b, m))
    if not a.shape == b.shape == m.shape:
        raise DimensionMismatch(f"dimension mismatch: {a.shape}, {b.shape}, {m.shape}")
    denom = complex(np.vdot(b, a))
    if abs(denom) < tol.overlap_floor:
        raise OverlapTooSmall(f"|<b|a>| = {abs(denom):.3e} is below the overlap floor", overlap=abs(denom))
    return complex(np.vdot(b, m) * np.vdot(m, a)) / denom


def conditional_kernel(A, B, M, tol=None):
    """State-independent kernel ``p(m|a_j,b_k)`` for every (m, j, k)."""
    tol = resolve(tol)
    _check_same_dim(A, B, M)
    denom = overlap_matrix(A, B)  # [j, k] = <b_k|a_j>
    defined = np.abs(denom) >= tol.overlap_floor
    m_of_a = M.matrix.conj().T @ A.matrix  # [m, j] = <m|a_j>
    b_of_m = B.matrix.conj().T @ M.matrix  # [k, m] = <b_k|m>
    numer = m_of_a[:, :, None] * b_of_m.T[:, None, :]
    safe = np.where(defined, denom, 1.0)
    values = np.where(defined[None, :, :], numer / safe[None, :, :], 0.0)
    return ConditionalKernel(values, defined, A.name, B.name, M.name, M.labels)


def _require_defined(kernel):
    if not kernel.fully_defined:
        cells = kernel.undefined_cells()
        raise UndefinedCells(f"kernel has {len(cells)} undefined (a, b) cells, first {cells[0]}", cells)


def _check_kernel_tags(kd, kernel):
    if kd.dim != kernel.dim:
        raise DimensionMismatch(f"KD dim {kd.dim} != kernel dim {kernel.dim}")
    if (kd.basis_a_id, kd.basis_b_id) != (kernel.basis_a_id, kernel.basis_b_id):
        raise BasisMismatch(
            f"KD tagged ({kd.basis_a_id!r}, {kd.basis_b_id!r}), kernel tagged "
            f"({kernel.basis_a_id!r}, {kernel.basis_b_id!r})"
        )


def predict_probabilities(kd, kernel, tol=None):
    """Complex Bayes rule: ``P(m) = sum_{a,b} rho(a,b) p(m|a,b)``.

    Returns the real parts after checking that the imaginary parts vanish
    and that the result is a probability vector.
    """
    tol = resolve(tol)
    _check_kernel_tags(kd, kernel)
    _require_defined(kernel)
    probs = np.einsum("jk,mjk->m", kd.values, kernel.values)
    leak = float(np.max(np.abs(probs.imag)))
    if leak >= tol.prediction:
        raise ImaginaryLeak(f"predicted probabilities have imaginary part {leak:.3e}")
    p = probs.real.copy()
    if np.any(p < -tol.prediction) or np.any(p > 1 + tol.prediction):
        raise NormalizationError(f"predicted probabilities outside [0, 1]: {p}")
    if abs(p.sum() - 1.0) > tol.prediction:
        raise NormalizationError(f"predicted probabilities sum to {p.sum()!r}")
    return p


def transform_representation(kd, kernel, tol=None):
    """Map ``rho(a, b)`` to ``rho(a, m) = sum_b rho(a, b) p(m|a, b)``."""
    tol = resolve(tol)
    _check_kernel_tags(kd, kernel)
    _require_defined(kernel)
    values = np.einsum("jk,mjk->jm", kd.values, kernel.values)
    out = KDDistribution(values, kd.basis_a_id, kernel.basis_m_id, kd.labels_a, kernel.labels_m)
    return out.validate(tol.kernel_sum)


def invert_transform(kd_am, A, M, B, tol=None):
    """Undo :func:`transform_representation`: take ``rho(a, m)`` back to ``rho(a, b)``.

    The inverse uses the kernel ``p(b|a, m)`` of the triple (A, M, B).
    """
    return transform_representation(kd_am, conditional_kernel(A, M, B, tol), tol)


def principal_arg(z):
    """Argument in (-pi, pi]; the cut value -pi is mapped to +pi."""
    angle = math.atan2(z.imag, z.real)
    return math.pi if angle <= -math.pi else angle


def action_phase(a, b, m, hbar=1.0, tol=None):
    """Action ``S = hbar * Arg p(m|a,b)``.

    Raises ZeroWeakValue when ``|p(m|a,b)|`` is below
    ``tol.magnitude_floor``, since its phase is then undefined.
    """
    tol = resolve(tol)
    hbar = float(hbar)
    if not (hbar > 0 and math.isfinite(hbar)):
        raise InputError(f"hbar must be a positive finite number, got {hbar}")
    w = conditional_weak_value(a, b, m, tol)
    if abs(w) < tol.magnitude_floor:
        raise ZeroWeakValue(f"|p(m|a,b)| = {abs(w):.3e}; the action phase is undefined")
    return ActionPhase(hbar * principal_arg(w), hbar, w)
