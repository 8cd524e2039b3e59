"""Dense complex states, bases and seeded random generation.

All objects are small immutable wrappers around ``numpy`` arrays of dtype
``complex128``.  Vectors are 1-d arrays, operators are row-major 2-d arrays,
and the vectors of a basis are stored as the *columns* of a unitary matrix.

Random numbers come from :class:`SeededStream`, which draws raw 64-bit words
from numpy's ``PCG64`` bit generator seeded through ``SeedSequence``.  Both
have a documented, release-stable bit stream, and everything built on top
of the raw words (uniform doubles, Box-Muller Gaussians) is done here, so
outputs for a fixed seed do not depend on numpy's distribution code.
"""

from dataclasses import dataclass, field
import hashlib

import numpy as np

from .config import resolve
from .errors import (
    DimensionMismatch,
    DuplicateLabel,
    InputError,
    InvalidState,
    NotNormalized,
    NotOrthonormal,
)

RNG_ALGORITHM = "PCG64 via SeedSequence; uniforms (raw>>11 + 0.5)*2^-53; Box-Muller complex normals"

_SEED_LIMIT = 2**64


def _as_readonly(array, ndim):
    arr = np.array(array, dtype=np.complex128, copy=True)
    if arr.ndim != ndim:
        raise InputError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("array contains NaN or Inf")
    arr.setflags(write=False)
    return arr


def hermiticity_deviation(matrix):
    """Largest elementwise ``|M - M^dagger|``."""
    matrix = np.asarray(matrix)
    return float(np.max(np.abs(matrix - matrix.conj().T)))


@dataclass(frozen=True, eq=False)
class StateVector:
    """A normalized pure state."""

    amplitudes: np.ndarray
    tol: object = field(default=None, repr=False)

    def __post_init__(self):
        amps = _as_readonly(self.amplitudes, 1)
        if amps.size == 0:
            raise InputError("state vector must have dim >= 1")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > resolve(self.tol).unit_norm:
            raise NotNormalized(f"state vector norm is {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes):
        """Build a state from unnormalized amplitudes."""
        amps = np.asarray(amplitudes, dtype=np.complex128)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise NotNormalized("cannot normalize the zero vector")
        return cls(amps / norm)

    @classmethod
    def basis_state(cls, dim, index):
        amps = np.zeros(dim, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)

    @property
    def dim(self):
        return self.amplitudes.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)

    def __repr__(self):
        return f"StateVector({np.array2string(self.amplitudes, precision=4)})"


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A Hermitian, unit-trace, positive semidefinite matrix.

    ``hermiticity_deviation`` is a diagnostic recorded by producers that
    symmetrize their output (e.g. reconstruction); it is 0 otherwise.
    """

    matrix: np.ndarray
    tol: object = field(default=None, repr=False)
    hermiticity_deviation: float = 0.0

    def __post_init__(self):
        mat = _as_readonly(self.matrix, 2)
        tol = resolve(self.tol)
        if mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise InvalidState(f"density matrix must be square and non-empty, got {mat.shape}")
        herm = hermiticity_deviation(mat)
        if herm > tol.hermitian:
            raise InvalidState(f"density matrix is not Hermitian (deviation {herm:.3e})")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > tol.trace:
            raise InvalidState(f"density matrix trace is {trace!r}, expected 1")
        lowest = float(np.linalg.eigvalsh(mat)[0])
        if lowest < -tol.psd:
            raise InvalidState(f"density matrix has negative eigenvalue {lowest:.3e}")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, dim):
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    def expectation(self, state):
        """``<psi|rho|psi>`` for a pure state ``psi`` (real part)."""
        v = np.asarray(state)
        _check_dims(self.dim, v.shape[0])
        return float(np.real(np.vdot(v, self.matrix @ v)))

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """A complete orthonormal basis with string labels.

    ``matrix[:, j]`` is the j-th basis vector.  Build instances through
    :func:`validate_basis` or :func:`haar_random_basis`; the constructor
    checks the same invariants.
    """

    matrix: np.ndarray
    labels: tuple
    name: str = ""
    tol: object = field(default=None, repr=False)

    def __post_init__(self):
        mat = _as_readonly(self.matrix, 2)
        dim = mat.shape[0]
        if mat.shape != (dim, dim) or dim == 0:
            raise DimensionMismatch(f"a basis of C^{dim} needs exactly {dim} vectors, got {mat.shape[1]}")
        labels = tuple(str(label) for label in self.labels)
        if len(labels) != dim:
            raise DimensionMismatch(f"{len(labels)} labels for {dim} vectors")
        if len(set(labels)) != dim:
            seen = set()
            dup = next(label for label in labels if label in seen or seen.add(label))
            raise DuplicateLabel(f"duplicate basis label {dup!r}")
        gram = mat.conj().T @ mat
        dev = np.abs(gram - np.eye(dim))
        worst = np.unravel_index(int(np.argmax(dev)), dev.shape)
        if dev[worst] > resolve(self.tol).orthonormal:
            raise NotOrthonormal(
                f"vectors {labels[worst[0]]!r} and {labels[worst[1]]!r} violate orthonormality "
                f"by {dev[worst]:.3e}",
                pair=(int(worst[0]), int(worst[1])),
                deviation=float(dev[worst]),
            )
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "labels", labels)
        if not self.name:
            digest = hashlib.sha256(mat.tobytes()).hexdigest()[:12]
            object.__setattr__(self, "name", f"basis-{digest}")

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def vectors(self):
        return tuple(StateVector(self.matrix[:, j]) for j in range(self.dim))

    def __len__(self):
        return self.dim

    def __getitem__(self, index):
        return StateVector(self.matrix[:, index])

    def index(self, label):
        return self.labels.index(str(label))

    def projector(self, index):
        v = self.matrix[:, index]
        return np.outer(v, v.conj())


def _check_dims(*dims):
    if len(set(dims)) != 1:
        raise DimensionMismatch(f"dimension mismatch: {dims}")


def inner_product(x, y):
    """``<x|y>``, conjugate-linear in ``x``."""
    x = np.asarray(x)
    y = np.asarray(y)
    _check_dims(x.shape[0], y.shape[0])
    return complex(np.vdot(x, y))


def density_from_pure(psi):
    """The projector ``|psi><psi|``."""
    if not isinstance(psi, StateVector):
        psi = StateVector(psi)
    v = psi.amplitudes
    return DensityOperator(np.outer(v, v.conj()))


def validate_basis(vectors, labels=None, name="", tol=None):
    """Check that ``vectors`` form an orthonormal basis and wrap them.

    Parameters
    ----------
    vectors : sequence of StateVector or array_like
        Exactly ``dim`` vectors of dimension ``dim``.
    labels : sequence of str, optional
        Distinct labels; defaults to ``"0", "1", ...``.
    name : str, optional
        Identity tag carried into KD distributions and kernels.

    Raises
    ------
    DimensionMismatch
        Vectors of unequal length, or the wrong number of vectors.
    NotOrthonormal
        The Gram matrix differs from the identity by more than the
        tolerance; the worst pair is reported.
    DuplicateLabel
    """
    arrays = [np.asarray(v, dtype=np.complex128) for v in vectors]
    if not arrays:
        raise DimensionMismatch("empty basis")
    dims = {a.shape for a in arrays}
    if len(dims) != 1 or arrays[0].ndim != 1:
        raise DimensionMismatch(f"basis vectors have inconsistent shapes {sorted(dims)}")
    if len(arrays) != arrays[0].shape[0]:
        raise DimensionMismatch(f"{len(arrays)} vectors given for dimension {arrays[0].shape[0]}")
    if labels is None:
        labels = [str(j) for j in range(len(arrays))]
    return OrthonormalBasis(np.stack(arrays, axis=1), tuple(labels), name=name, tol=tol)


def computational_basis(dim, name="computational"):
    return OrthonormalBasis(np.eye(dim, dtype=np.complex128), tuple(str(j) for j in range(dim)), name=name)


class SeededStream:
    """Reproducible random stream.

    ``SeededStream(seed, j, k)`` gives a stream independent of
    ``SeededStream(seed)`` and of every other key; the key is passed as the
    ``spawn_key`` of a ``SeedSequence``.
    """

    algorithm = RNG_ALGORITHM

    def __init__(self, seed, *key):
        seed = int(seed)
        if not 0 <= seed < _SEED_LIMIT:
            raise InputError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self.key = tuple(int(k) for k in key)
        self._bits = np.random.PCG64(np.random.SeedSequence(seed, spawn_key=self.key))

    def uniform(self, size):
        """Doubles in the open interval (0, 1) with 53 random bits."""
        raw = self._bits.random_raw(size)
        return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53

    def complex_normal(self, shape):
        """Complex Gaussians with independent N(0, 1/2) real and imaginary parts.

        Box-Muller: ``sqrt(-ln u1) * exp(2 pi i u2)``.
        """
        n = int(np.prod(shape))
        u = self.uniform(2 * n)
        radius = np.sqrt(-np.log(u[:n]))
        return (radius * np.exp(2j * np.pi * u[n:])).reshape(shape)


def ginibre(rows, cols, stream):
    return stream.complex_normal((rows, cols))


def haar_unitary(dim, seed):
    """Haar-random unitary from the QR decomposition of a Ginibre matrix.

    Column phases are fixed so that R has a positive real diagonal, which
    makes the distribution exactly Haar (Mezzadri's correction).
    """
    if int(dim) < 1:
        raise InputError(f"dim must be >= 1, got {dim}")
    z = ginibre(dim, dim, SeededStream(seed))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def haar_random_basis(dim, seed, name=None):
    """Columns of a Haar-random unitary as an :class:`OrthonormalBasis`."""
    u = haar_unitary(dim, seed)
    return OrthonormalBasis(u, tuple(str(j) for j in range(dim)), name=name or f"haar-{dim}-{seed}")


def random_state(dim, seed):
    """Haar-random pure state (first column of a Haar unitary)."""
    return StateVector(haar_unitary(dim, seed)[:, 0])


def random_density(dim, rank, seed):
    """Random mixed state ``G G^dagger / tr(G G^dagger)`` with ``G`` dim x rank Ginibre."""
    dim, rank = int(dim), int(rank)
    if dim < 1:
        raise InputError(f"dim must be >= 1, got {dim}")
    if not 1 <= rank <= dim:
        raise InputError(f"rank must lie in [1, {dim}], got {rank}")
    g = ginibre(dim, rank, SeededStream(seed))
    m = g @ g.conj().T
    m = m / np.trace(m).real
    # exact Hermiticity; the product above is Hermitian only up to rounding
    m = 0.5 * (m + m.conj().T)
    return DensityOperator(m)


def born_probabilities(rho, basis):
    """``<m|rho|m>`` for every vector of ``basis``."""
    _check_dims(rho.dim, basis.dim)
    u = basis.matrix
    return np.real(np.einsum("im,ij,jm->m", u.conj(), rho.matrix, u))
