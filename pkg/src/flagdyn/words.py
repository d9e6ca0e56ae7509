"""Group presentations, reduced words and word-ball enumeration.

Words are strings over the generator labels: a lowercase letter is a
generator, its uppercase form the inverse ("abA" means a b a^-1).  Balls
are enumerated breadth-first over freely reduced words in a fixed letter
order, and deduplicated by exact matrix equality so relations in a
non-free input collapse to a single representative.  The ball of radius L
is always a prefix of the ball of radius L + 1.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from dataclasses import dataclass
from .errors import DeterminantNotOneError, SchemaError
from .qlinalg import QMatrix

GROUP_FILE_VERSION = 1
CACHE_VERSION = 1


def reduce_word(word: str) -> str:
    """Freely reduce: cancel adjacent inverse pairs."""
    out: list[str] = []
    for ch in word:
        if out and out[-1] == ch.swapcase() and out[-1] != ch:
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def word_inverse(word: str) -> str:
    return "".join(ch.swapcase() for ch in reversed(word))


def word_mul(*words: str) -> str:
    return reduce_word("".join(words))


@dataclass(frozen=True)
class GroupPresentation:
    """Finitely many labeled determinant-one rational matrices."""

    dim: int
    generators: tuple[tuple[str, QMatrix], ...]
    field_tag: str = "Q"

    def __post_init__(self):
        labels = [lab for lab, _ in self.generators]
        if len(set(labels)) != len(labels):
            raise SchemaError("generator labels must be unique")
        for lab, mat in self.generators:
            if not (len(lab) == 1 and lab.isalpha() and lab.islower()):
                raise SchemaError(f"label {lab!r} must be a single lowercase letter")
            if mat.dim != self.dim:
                raise SchemaError(f"generator {lab!r} has dimension {mat.dim}, expected {self.dim}")
            if mat.det != 1:
                raise DeterminantNotOneError(f"generator {lab!r} has determinant {mat.det}")

    def letters(self) -> list[str]:
        """Extension alphabet in deterministic order: a, A, b, B, ..."""
        out = []
        for lab, _ in self.generators:
            out.extend([lab, lab.upper()])
        return out

    def matrix_of_letter(self, ch: str) -> QMatrix:
        for lab, mat in self.generators:
            if ch == lab:
                return mat
            if ch == lab.upper():
                return mat.inverse()
        raise SchemaError(f"unknown letter {ch!r}")

    def word_matrix(self, word: str) -> QMatrix:
        m = QMatrix.identity(self.dim)
        for ch in word:
            m = m * self.matrix_of_letter(ch)
        return m

    def to_json(self) -> dict:
        return {
            "version": GROUP_FILE_VERSION,
            "dimension": self.dim,
            "field": self.field_tag,
            "generators": [{"label": lab, "matrix": mat.to_json()} for lab, mat in self.generators],
        }

    def content_hash(self) -> str:
        doc = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(doc.encode()).hexdigest()


def parse_group(document: dict) -> GroupPresentation:
    """Validate a group document and build the presentation."""
    if not isinstance(document, dict):
        raise SchemaError("group document must be a JSON object")
    if document.get("version", GROUP_FILE_VERSION) != GROUP_FILE_VERSION:
        raise SchemaError(f"unsupported group file version {document.get('version')}")
    if document.get("field", "Q") != "Q":
        raise SchemaError("only the rational field tag 'Q' is supported")
    try:
        dim = int(document["dimension"])
        gens_doc = document["generators"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed group document: {exc}") from exc
    if dim < 1:
        raise SchemaError("dimension must be positive")
    gens = []
    for g in gens_doc:
        try:
            label = g["label"]
            rows = g["matrix"]
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed generator entry: {exc}") from exc
        try:
            mat = QMatrix.from_json(rows)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad matrix for generator {label!r}: {exc}") from exc
        gens.append((label, mat))
    return GroupPresentation(dim=dim, generators=tuple(gens))


def sanov_group() -> GroupPresentation:
    """The free subgroup of SL_2(Z) generated by the two shears by 2."""
    return GroupPresentation(
        dim=2,
        generators=(
            ("a", QMatrix([[1, 2], [0, 1]])),
            ("b", QMatrix([[1, 0], [2, 1]])),
        ),
    )


_BALL_MEMO: dict[tuple[str, int], list] = {}


def enumerate_ball(
    group: GroupPresentation,
    radius: int,
    cache_dir: str | None = None,
) -> list[tuple[str, QMatrix]]:
    """All distinct elements of word length <= radius, with shortest words.

    Deterministic order: breadth-first over freely reduced words, letters
    in presentation order; the first word reaching a matrix wins.
    Results are memoized per (group, radius) within the process; the
    optional cache directory persists them across runs.
    """
    if radius < 0:
        raise SchemaError("radius must be >= 0")
    memo_key = (group.content_hash(), radius)
    if memo_key in _BALL_MEMO:
        ball = _BALL_MEMO[memo_key]
        if cache_dir is not None and not os.path.exists(_cache_path(group, radius, cache_dir)):
            _cache_store(group, radius, cache_dir, ball)
        return list(ball)
    if cache_dir is not None:
        cached = _cache_load(group, radius, cache_dir)
        if cached is not None:
            _BALL_MEMO[memo_key] = cached
            return list(cached)
    letters = group.letters()
    identity = QMatrix.identity(group.dim)
    seen = {identity.content_key(): ""}
    ball: list[tuple[str, QMatrix]] = [("", identity)]
    frontier: list[tuple[str, QMatrix]] = [("", identity)]
    for _ in range(radius):
        nxt: list[tuple[str, QMatrix]] = []
        for word, mat in frontier:
            for ch in letters:
                if word and word[-1] == ch.swapcase() and word[-1] != ch:
                    continue  # not freely reduced
                new_word = word + ch
                new_mat = mat * group.matrix_of_letter(ch)
                nxt.append((new_word, new_mat))
                key = new_mat.content_key()
                if key not in seen:
                    seen[key] = new_word
                    ball.append((new_word, new_mat))
        frontier = nxt
    _BALL_MEMO[memo_key] = ball
    if cache_dir is not None:
        _cache_store(group, radius, cache_dir, ball)
    return list(ball)


def _cache_path(group: GroupPresentation, radius: int, cache_dir: str) -> str:
    return os.path.join(cache_dir, f"ball-{group.content_hash()[:24]}-r{radius}.json")


def _cache_load(group, radius, cache_dir):
    path = _cache_path(group, radius, cache_dir)
    if not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            doc = json.load(fh)
        if doc.get("version") != CACHE_VERSION or doc.get("radius") != radius:
            return None
        if doc.get("group_hash") != group.content_hash():
            return None
        return [(w, QMatrix.from_json(rows)) for w, rows in doc["ball"]]
    except (OSError, ValueError, KeyError):
        return None


def _cache_store(group, radius, cache_dir, ball):
    os.makedirs(cache_dir, exist_ok=True)
    doc = {
        "version": CACHE_VERSION,
        "group_hash": group.content_hash(),
        "radius": radius,
        "ball": [[w, m.to_json()] for w, m in ball],
    }
    path = _cache_path(group, radius, cache_dir)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)  # atomic publish
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def euler_phi(n: int) -> int:
    """Euler totient by trial-division factorization."""
    result = n
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1 if p == 2 else 2
    if n > 1:
        result -= result // n
    return result


def torsion_bound(d: int) -> int:
    """lcm of all n with phi(n) <= d: every finite-order element of
    GL_d(Q) has order dividing this, since its eigenvalues are roots of
    unity of degree <= d over Q and its unipotent part is trivial in
    characteristic zero.

    phi(n) >= sqrt(n/2), so scanning n <= 2 d^2 + 2 is exhaustive.
    """
    if d < 1:
        raise SchemaError("dimension must be positive")
    m = 1
    for n in range(1, 2 * d * d + 3):
        if euler_phi(n) <= d:
            m = m * n // math.gcd(m, n)
    return m
