"""JSON state files, manifests and run reports.

A state file stores a 4x4 density matrix in the computational basis
|00>, |01>, |10>, |11> as rows of [re, im] pairs. Floats are written with
Python's shortest round-trip repr, so save followed by load is bit-exact.
"""

import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidState, StateFileError
from .states import as_density

FORMAT_VERSION = "1.0"


def _pair(z):
    return [float(z.real), float(z.imag)]


def matrix_to_pairs(m):
    return [[_pair(z) for z in row] for row in np.asarray(m, dtype=complex)]


def pairs_to_matrix(rows):
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"matrix entries are not numeric pairs: {exc}") from None
    if arr.shape != (4, 4, 2):
        raise StateFileError(f"matrix must be 4x4 [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_dict(matrix, metadata=None):
    doc = {"format_version": FORMAT_VERSION, "matrix": matrix_to_pairs(matrix)}
    if metadata:
        doc["metadata"] = metadata
    return doc


def state_from_dict(doc):
    """Parse a state document; the matrix must pass density-matrix validation."""
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise StateFileError("state document needs a 'matrix' field")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise StateFileError(f"unsupported format_version {version!r}")
    m = pairs_to_matrix(doc["matrix"])
    try:
        as_density(m, clamp=False)
    except InvalidState as exc:
        raise StateFileError(f"invalid density matrix: {exc}") from None
    return m, doc.get("metadata", {})


def _dump(doc, path):
    text = json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def _load_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path}: not valid JSON ({exc})") from None


def save_state(path, matrix, metadata=None):
    _dump(state_to_dict(matrix, metadata), path)


def load_state(path):
    """Return ``(matrix, metadata)``; raises StateFileError on any format problem."""
    return state_from_dict(_load_json(path))


def save_manifest(path, manifest):
    _dump({"format_version": FORMAT_VERSION, **manifest}, path)


def load_manifest(path):
    """Return ``(manifest dict, list of absolute state paths)``."""
    doc = _load_json(path)
    if not isinstance(doc, dict) or doc.get("kind") != "manifest":
        raise StateFileError(f"{path}: not a manifest")
    if doc.get("format_version") != FORMAT_VERSION:
        raise StateFileError(f"unsupported format_version {doc.get('format_version')!r}")
    base = Path(path).resolve().parent
    return doc, [base / entry["file"] for entry in doc["states"]]


def is_manifest(path):
    try:
        doc = _load_json(path)
    except (OSError, StateFileError):
        return False
    return isinstance(doc, dict) and doc.get("kind") == "manifest"


def _clean(obj):
    # json has no NaN/inf; reports write them as null
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def save_report(path, report):
    _dump(_clean({"format_version": FORMAT_VERSION, **report}), path)
