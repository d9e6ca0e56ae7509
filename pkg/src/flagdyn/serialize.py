"""Wire formats: group files, witness files and verification reports.

All numeric payloads are exact rational strings ("num/den", "/den"
omitted for integers) or pairs of interval endpoints; no bare floats
enter a stored file.  Files are written canonically (sorted keys, compact
separators) so equal objects produce byte-identical documents.
"""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction

from .errors import MalformedWitnessError, SchemaError
from .qlinalg import QMatrix, parse_rat, rat_str
from .witness import PhpWitness, SetDescriptor, VerificationReport
from .words import GroupPresentation, parse_group

WITNESS_FILE_VERSION = 1


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def write_canonical(path: str, obj) -> None:
    """Atomic write: temp file then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(canonical_dumps(obj))
            fh.write("\n")
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        raise SchemaError(f"cannot read JSON document {path}: {exc}") from exc


def load_group(path: str) -> GroupPresentation:
    return parse_group(load_json(path))


def witness_to_json(witness: PhpWitness) -> dict:
    return {
        "version": WITNESS_FILE_VERSION,
        "group": witness.group.to_json(),
        "F": list(witness.f_words),
        "epsilon": rat_str(witness.epsilon),
        "n": witness.n,
        "gammas": [{"word": w, "matrix": m.to_json()} for w, m in witness.gammas],
        "C": [c.to_json() for c in witness.c_sets],
        "D": [d.to_json() for d in witness.d_sets],
        "provenance": witness.provenance,
    }


def witness_from_json(doc: dict) -> PhpWitness:
    try:
        if doc.get("version") != WITNESS_FILE_VERSION:
            raise MalformedWitnessError(f"unsupported witness version {doc.get('version')}")
        group = parse_group(doc["group"])
        f_words = tuple(doc["F"])
        epsilon = parse_rat(doc["epsilon"])
        n = int(doc["n"])
        gammas = tuple((g["word"], QMatrix.from_json(g["matrix"])) for g in doc["gammas"])
        c_sets = tuple(SetDescriptor.from_json(c) for c in doc["C"])
        d_sets = tuple(SetDescriptor.from_json(d) for d in doc["D"])
        provenance = doc.get("provenance", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedWitnessError(f"malformed witness document: {exc}") from exc
    return PhpWitness(
        group=group,
        f_words=f_words,
        epsilon=Fraction(epsilon),
        n=n,
        gammas=gammas,
        c_sets=c_sets,
        d_sets=d_sets,
        provenance=provenance,
    )


def save_witness(path: str, witness: PhpWitness) -> None:
    write_canonical(path, witness_to_json(witness))


def load_witness(path: str) -> PhpWitness:
    return witness_from_json(load_json(path))


def report_to_json(report: VerificationReport) -> dict:
    return report.to_json()
