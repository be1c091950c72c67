"""Problem and certificate files.

Problems are JSON documents with keys ``matrix`` (array of row arrays),
``partition`` (list of block sizes), optional ``n`` (order cross-check)
and optional ``options`` (strategy / epsilon / hinf_tol / margin
overrides).  Certificates carry the solution blocks at full precision
together with a digest binding them to the exact input; verification
refuses to check a certificate against a different system.
"""

from __future__ import annotations

import datetime
import hashlib
import json

import numpy as np

from . import __version__
from .certificates import Certificate, TestReport
from .partition import PartitionedMatrix, make_partitioned

__all__ = [
    "input_digest",
    "load_problem",
    "certificate_document",
    "report_document",
    "write_json",
    "load_certificate",
]

_ALLOWED_OPTIONS = {"strategy", "epsilon", "hinf_tol", "margin"}


def input_digest(matrix, partition) -> str:
    """Content hash binding a certificate to its system.

    The digest covers a canonical rendering of the matrix (17
    significant digits) and the partition — nothing else, so timestamps
    and tool versions never perturb it.
    """
    arr = np.asarray(matrix, dtype=float)
    entries = ";".join(format(x, ".17g") for x in arr.ravel())
    sizes = ",".join(str(int(k)) for k in partition)
    payload = f"matrix[{arr.shape[0]}x{arr.shape[1]}]:{entries}|partition:{sizes}"
    return "sha256:" + hashlib.sha256(payload.encode()).hexdigest()


def load_problem(path) -> tuple[PartitionedMatrix, dict]:
    """Read and validate a problem file; returns the system and options.

    Raises ``ValueError`` (with a human-readable message) on any parse or
    validation failure — the CLI maps that to the input-error exit code.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: expected a JSON object at top level")
    if "matrix" not in doc or "partition" not in doc:
        raise ValueError(f"{path}: keys 'matrix' and 'partition' are required")

    matrix = np.asarray(doc["matrix"], dtype=float)
    p = make_partitioned(matrix, doc["partition"])
    if "n" in doc and int(doc["n"]) != p.order:
        raise ValueError(
            f"{path}: declared n={doc['n']} but the matrix has order {p.order}"
        )

    options = doc.get("options", {})
    if not isinstance(options, dict):
        raise ValueError(f"{path}: 'options' must be an object")
    unknown = set(options) - _ALLOWED_OPTIONS
    if unknown:
        raise ValueError(f"{path}: unknown options {sorted(unknown)}")
    return p, options


def _matrix_to_lists(m: np.ndarray) -> list:
    return [[float(x) for x in row] for row in np.asarray(m)]


def certificate_document(
    p: PartitionedMatrix,
    cert: Certificate | None,
    strategy_requested: str,
    status: str | None = None,
    error: str | None = None,
) -> dict:
    """Serializable certificate record (status + blocks + digest)."""
    doc = {
        "status": status or ("certified" if cert is not None else "not-certified"),
        "strategy_requested": strategy_requested,
        "partition": list(p.partition.sizes),
        "input_digest": input_digest(p.matrix, p.partition.sizes),
        "tool_version": __version__,
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if cert is not None:
        doc.update(
            strategy=cert.strategy,
            blocks=[_matrix_to_lists(b) for b in cert.blocks],
            lyapunov_margin=float(cert.lyapunov_margin),
            epsilon=list(cert.epsilon),
            riccati_residuals=list(cert.riccati_residuals),
        )
    if error is not None:
        doc["error"] = error
    return doc


def report_document(p: PartitionedMatrix, report: TestReport) -> dict:
    doc = {
        "certified": report.certified,
        "strategy_used": report.strategy_used,
        "input_digest": input_digest(p.matrix, p.partition.sizes),
        "routes": {name: r.to_dict() for name, r in report.routes.items()},
    }
    cert = report.certificate
    if cert is not None:
        doc["lyapunov_margin"] = float(cert.lyapunov_margin)
    return doc


def write_json(path, doc: dict) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_certificate(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "status" not in doc:
        raise ValueError(f"{path}: not a certificate file")
    return doc
