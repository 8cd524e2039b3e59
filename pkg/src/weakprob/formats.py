"""JSON state/basis files and the result envelope.

State file (``schema_version`` "1")::

    {"schema_version": "1", "dim": 2, "kind": "pure",
     "amplitudes": [[re, im], ...], "label": "optional"}
    {"schema_version": "1", "dim": 2, "kind": "mixed",
     "matrix": [[[re, im], ...], ...]}

Basis file::

    {"schema_version": "1", "dim": 2, "labels": ["0", "1"],
     "vectors": [[[re, im], ...], ...], "name": "optional"}

A basis without ``name`` is identified by its file stem.  Complex numbers
are always two-element ``[re, im]`` arrays.
"""

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .errors import InputError, WeakProbError
from .kdq import KDDistribution
from .linalg import DensityOperator, StateVector, validate_basis

SCHEMA_VERSION = "1"


class FileFormatError(InputError):
    """A file could not be parsed; names the file and the offending field."""

    kind = "FileFormatError"

    def __init__(self, path, field, message):
        super().__init__(f"{path}: field {field!r}: {message}")
        self.path = str(path)
        self.field = field


def c2j(z):
    """Complex to ``[re, im]``; negative zeros are normalized to 0.0."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        return None
    return [z.real + 0.0, z.imag + 0.0]


def j2c(pair, path="<input>", field="value"):
    if (
        not isinstance(pair, (list, tuple))
        or len(pair) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
    ):
        raise FileFormatError(path, field, f"expected [re, im] number pair, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def cvec(values):
    return [c2j(z) for z in np.ravel(values)]


def cmat(values):
    return [[c2j(z) for z in row] for row in np.asarray(values)]


def real_list(values):
    return [float(x) + 0.0 for x in np.ravel(values)]


def _load_json(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileFormatError(path, "<file>", f"cannot read: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(path, "<file>", f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise FileFormatError(path, "<root>", "expected a JSON object")
    return data


def _field(data, name, path, kind=None):
    if name not in data:
        raise FileFormatError(path, name, "missing")
    value = data[name]
    if kind is not None and not isinstance(value, kind):
        raise FileFormatError(path, name, f"expected {getattr(kind, '__name__', kind)}")
    return value


def _check_header(data, path):
    version = _field(data, "schema_version", path)
    if str(version) != SCHEMA_VERSION:
        raise FileFormatError(path, "schema_version", f"unsupported version {version!r}")
    dim = _field(data, "dim", path, int)
    if isinstance(dim, bool) or dim < 1:
        raise FileFormatError(path, "dim", f"must be a positive integer, got {dim!r}")
    return dim


def _complex_vector(raw, dim, path, field):
    if not isinstance(raw, list) or len(raw) != dim:
        raise FileFormatError(path, field, f"expected {dim} [re, im] entries")
    return np.array([j2c(x, path, field) for x in raw], dtype=np.complex128)


def _complex_matrix(raw, dim, path, field):
    if not isinstance(raw, list) or len(raw) != dim:
        raise FileFormatError(path, field, f"expected {dim} rows")
    return np.stack([_complex_vector(row, dim, path, f"{field}[{i}]") for i, row in enumerate(raw)])


def _wrap(path, field, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except InputError as exc:
        raise FileFormatError(path, field, str(exc)) from exc


def load_state(path):
    """Parse a state file into a :class:`StateVector` or :class:`DensityOperator`."""
    data = _load_json(path)
    dim = _check_header(data, path)
    kind = _field(data, "kind", path, str)
    if kind == "pure":
        amps = _complex_vector(_field(data, "amplitudes", path), dim, path, "amplitudes")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > 1e-10:
            raise FileFormatError(path, "amplitudes", f"norm is {norm!r}, expected 1")
        return _wrap(path, "amplitudes", StateVector, amps)
    if kind == "mixed":
        mat = _complex_matrix(_field(data, "matrix", path), dim, path, "matrix")
        return _wrap(path, "matrix", DensityOperator, mat)
    raise FileFormatError(path, "kind", f"must be 'pure' or 'mixed', got {kind!r}")


def load_pure_state(path):
    state = load_state(path)
    if not isinstance(state, StateVector):
        raise FileFormatError(path, "kind", "a pure state is required here")
    return state


def load_density(path):
    state = load_state(path)
    if isinstance(state, StateVector):
        v = state.amplitudes
        return DensityOperator(np.outer(v, v.conj()))
    return state


def load_basis(path):
    data = _load_json(path)
    dim = _check_header(data, path)
    labels = _field(data, "labels", path, list)
    if len(labels) != dim or not all(isinstance(x, str) for x in labels):
        raise FileFormatError(path, "labels", f"expected {dim} strings")
    raw = _field(data, "vectors", path, list)
    if len(raw) != dim:
        raise FileFormatError(path, "vectors", f"expected {dim} vectors")
    vectors = [_complex_vector(v, dim, path, f"vectors[{i}]") for i, v in enumerate(raw)]
    name = data.get("name") or Path(path).stem
    return _wrap(path, "vectors", validate_basis, vectors, labels, name=str(name))


def load_kd(path):
    """Read a KD matrix from a ``kd`` command envelope or a bare KD file.

    A bare file has ``schema_version``, ``dim``, ``basis_a``, ``basis_b``
    and ``values`` (rows of ``[re, im]``).
    """
    data = _load_json(path)
    if "payload" in data:
        body = _field(data, "payload", path, dict)
        if "kd" not in body:
            raise FileFormatError(path, "payload.kd", "missing; not a kd envelope")
        dim = len(body["kd"]) if isinstance(body["kd"], list) else 0
        values = _complex_matrix(body["kd"], dim, path, "payload.kd")
    else:
        body = data
        dim = _check_header(data, path)
        values = _complex_matrix(_field(data, "values", path), dim, path, "values")
    if dim < 1:
        raise FileFormatError(path, "kd", "empty matrix")
    a_id = _field(body, "basis_a", path, str)
    b_id = _field(body, "basis_b", path, str)
    kd = _wrap(path, "kd", KDDistribution, values, a_id, b_id,
               tuple(body.get("labels_a") or ()), tuple(body.get("labels_b") or ()))
    try:
        kd.validate()
    except WeakProbError as exc:
        raise FileFormatError(path, "kd", str(exc)) from exc
    return kd


def file_digest(path):
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_state(path, state, label=None):
    """Write a StateVector or DensityOperator as a state file."""
    if isinstance(state, StateVector):
        data = {"schema_version": SCHEMA_VERSION, "dim": state.dim, "kind": "pure",
                "amplitudes": cvec(state.amplitudes)}
    else:
        data = {"schema_version": SCHEMA_VERSION, "dim": state.dim, "kind": "mixed",
                "matrix": cmat(state.matrix)}
    if label:
        data["label"] = label
    Path(path).write_text(dumps(data), encoding="utf-8")


def write_basis(path, basis, name=None):
    data = {"schema_version": SCHEMA_VERSION, "dim": basis.dim, "labels": list(basis.labels),
            "vectors": [cvec(basis.matrix[:, j]) for j in range(basis.dim)]}
    if name:
        data["name"] = name
    Path(path).write_text(dumps(data), encoding="utf-8")


def dumps(obj):
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def roundtrip(text):
    return dumps(json.loads(text))
