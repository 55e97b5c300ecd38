"""Substitution matrices and the node/pattern mutation and substitution scores.

Scores are exponentiated (``exp = e**raw``) so that higher raw values get more
weight. Two optional sentinel magnitudes may be configured: entries equal to
``bottom`` mean "impossible substitution" and entries equal to ``top`` mean
"certain substitution". In ``exp`` they are stored as ``0.0`` and ``inf``
respectively; the sentinel masks hold the exact semantics.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .graph import LabeledGraph, all_shape_bijections, shape_isomorphic

AMINO_ACIDS = "ARNDCQEGHILKMFPSTWYV"
BUNDLED_MATRICES = ("blosum62", "blosum80", "pam250")
MATRIX_DIR_ENV = "MOTIFSEL_MATRIX_DIR"


class MatrixError(ValueError):
    pass


class UndefinedSubstitution(ArithmeticError):
    """Raised when an elementary substitution divides by an impossible diagonal."""


@dataclass(frozen=True, eq=False)
class SubstitutionMatrix:
    alphabet: tuple
    raw: np.ndarray
    bottom: Optional[float] = None
    top: Optional[float] = None
    name: str = ""
    exp: np.ndarray = field(init=False, repr=False)
    is_bottom: np.ndarray = field(init=False, repr=False)
    is_top: np.ndarray = field(init=False, repr=False)
    index: Dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        raw = np.array(self.raw, dtype=float)
        n = len(self.alphabet)
        if raw.shape != (n, n):
            raise MatrixError(f"score table has shape {raw.shape}, expected ({n}, {n})")
        if len(set(self.alphabet)) != n:
            raise MatrixError("alphabet has repeated labels")
        raw.setflags(write=False)
        is_bottom = np.zeros_like(raw, dtype=bool) if self.bottom is None else raw == self.bottom
        is_top = np.zeros_like(raw, dtype=bool) if self.top is None else raw == self.top
        with np.errstate(over="ignore"):
            exp = np.exp(np.where(is_bottom | is_top, 0.0, raw))
        exp[is_bottom] = 0.0
        exp[is_top] = math.inf
        for arr in (exp, is_bottom, is_top):
            arr.setflags(write=False)
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "exp", exp)
        object.__setattr__(self, "is_bottom", is_bottom)
        object.__setattr__(self, "is_top", is_top)
        object.__setattr__(self, "index", {lab: i for i, lab in enumerate(self.alphabet)})
        self._validate()
        # per-label caches; the matrix is immutable so these never go stale
        object.__setattr__(self, "_mel", [self._compute_mel(i) for i in range(n)])
        object.__setattr__(self, "_sel", self._compute_sel_table())

    def _validate(self):
        for i, lab in enumerate(self.alphabet):
            if self.is_bottom[i].all():
                raise MatrixError(f"row {lab}: every entry is the impossible-substitution value")
            for j in np.flatnonzero(self.is_top[i]):
                others = [k for k in range(len(self.alphabet)) if k not in (i, j)]
                if not (self.is_bottom[i, others].all() and self.is_bottom[j, others].all()):
                    raise MatrixError(
                        f"row {lab}: certain substitution to {self.alphabet[j]} requires all "
                        f"other entries of rows {lab} and {self.alphabet[j]} to be impossible")

    def with_sentinels(self, bottom: Optional[float] = None, top: Optional[float] = None):
        return SubstitutionMatrix(self.alphabet, self.raw, bottom=bottom, top=top, name=self.name)

    def idx(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise KeyError(f"label {label!r} not in matrix alphabet") from None

    def score(self, a: str, b: str) -> float:
        return float(self.raw[self.idx(a), self.idx(b)])

    def _compute_mel(self, i: int) -> float:
        if self.is_bottom[i, i]:
            return 0.0
        if self.is_top[i, i]:
            return 1.0
        row = self.exp[i]
        if np.isinf(row).any():
            return 0.0
        return float(row[i] / math.fsum(row))

    def _compute_sel_table(self) -> np.ndarray:
        n = len(self.alphabet)
        table = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                table[i, j] = self._compute_sel(i, j)
        table.setflags(write=False)
        return table

    def _compute_sel(self, i: int, j: int) -> float:
        if self.is_bottom[i, i]:
            return math.nan
        if self.is_top[i, i]:
            # the rest of a certain row is impossible by construction
            return 1.0 if i == j else 0.0
        return float(self.exp[i, j] / self.exp[i, i])

    @property
    def substitution_table(self) -> np.ndarray:
        """``table[i, j]`` is the elementary substitution of label j by label i.

        NaN marks rows whose diagonal is impossible.
        """
        return self._sel

    @property
    def mutation_vector(self) -> List[float]:
        return list(self._mel)


# ---------------------------------------------------------------------------
# parsing


def parse_matrix(text: str, keep: Optional[Iterable[str]] = AMINO_ACIDS, name: str = "",
                 bottom: Optional[float] = None, top: Optional[float] = None) -> SubstitutionMatrix:
    """Read an NCBI-style matrix (``#`` comments, header row, labelled rows).

    Only labels in ``keep`` are retained (the auxiliary B/Z/X/* columns are
    dropped for the default amino-acid alphabet); ``keep=None`` keeps all.
    """
    header: Optional[List[str]] = None
    rows: Dict[str, List[float]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            header = parts
            if len(set(header)) != len(header):
                raise MatrixError(f"line {lineno}: repeated label in header")
            continue
        lab, vals = parts[0], parts[1:]
        if lab not in header:
            raise MatrixError(f"row {lab} (line {lineno}): unknown label")
        if len(vals) != len(header):
            raise MatrixError(f"row {lab} (line {lineno}): expected {len(header)} scores, "
                              f"got {len(vals)}")
        if lab in rows:
            raise MatrixError(f"row {lab} (line {lineno}): repeated row")
        try:
            rows[lab] = [float(v) for v in vals]
        except ValueError:
            raise MatrixError(f"row {lab} (line {lineno}): non-numeric score") from None
    if header is None:
        raise MatrixError("no header row found")
    keep_set = set(header) if keep is None else set(keep)
    alphabet = [lab for lab in header if lab in keep_set]
    missing = [lab for lab in alphabet if lab not in rows]
    if missing:
        raise MatrixError(f"row {missing[0]}: missing")
    cols = [header.index(lab) for lab in alphabet]
    raw = np.array([[rows[lab][c] for c in cols] for lab in alphabet])
    return SubstitutionMatrix(tuple(alphabet), raw, bottom=bottom, top=top, name=name)


def resolve_matrix_path(name_or_path: str) -> Path:
    """A file path as given, otherwise a bundled or ``$MOTIFSEL_MATRIX_DIR`` matrix name."""
    p = Path(name_or_path)
    if p.is_file():
        return p
    stem = name_or_path.lower()
    env_dir = os.environ.get(MATRIX_DIR_ENV)
    if env_dir:
        for cand in (Path(env_dir) / name_or_path, Path(env_dir) / f"{stem}.txt"):
            if cand.is_file():
                return cand
    bundled = resources.files("motifsel") / "data" / "matrices" / f"{stem}.txt"
    if bundled.is_file():
        return Path(str(bundled))
    raise FileNotFoundError(f"no matrix file or bundled matrix named {name_or_path!r}")


def load_matrix(name_or_path: str, bottom: Optional[float] = None,
                top: Optional[float] = None) -> SubstitutionMatrix:
    path = resolve_matrix_path(name_or_path)
    name = path.stem if path.suffix == ".txt" else path.name
    return parse_matrix(path.read_text(), name=name, bottom=bottom, top=top)


# ---------------------------------------------------------------------------
# scores


def _labels(p) -> Sequence[str]:
    """Node labels of a pattern; order is irrelevant to the product below."""
    if isinstance(p, LabeledGraph):
        return p.nodes
    return p.code.labels


def elementary_mutation_probability(m: SubstitutionMatrix, label: str) -> float:
    return m._mel[m.idx(label)]


def pattern_mutation_probability(m: SubstitutionMatrix, p) -> float:
    """One minus the product of the node mutation probabilities.

    Factors are multiplied in sorted-label order so the result is bit-identical
    for every node numbering of the same pattern.
    """
    prod = 1.0
    for lab in sorted(_labels(p)):
        prod *= elementary_mutation_probability(m, lab)
    return 1.0 - prod


def elementary_substitution_probability(m: SubstitutionMatrix, a: str, b: str) -> float:
    """How readily label ``a`` substitutes label ``b``; not symmetric."""
    val = m._sel[m.idx(a), m.idx(b)]
    if math.isnan(val):
        raise UndefinedSubstitution(f"label {a!r} has an impossible diagonal entry")
    return float(val)


def pattern_substitution_score(m: SubstitutionMatrix, p: LabeledGraph, q: LabeledGraph,
                               f: Dict[int, int]) -> float:
    """Mean elementary substitution of ``q``'s nodes by ``p``'s under ``f``."""
    if p.order != q.order or p.size != q.size or len(f) != p.order:
        raise ValueError("patterns do not have the same shape")
    for u, v in p.edges:
        if not q.has_edge(f[u], f[v]):
            raise ValueError("bijection does not preserve adjacency")
    total = 0.0
    for u in range(p.order):
        total += elementary_substitution_probability(m, p.nodes[u], q.nodes[f[u]])
    return total / p.order


def substitutes(m: SubstitutionMatrix, p: LabeledGraph, q: LabeledGraph, tau: float,
                maximizing: bool = False) -> bool:
    """Whether ``p`` substitutes ``q`` at threshold ``tau`` (a percentage).

    An undefined score (``p`` holds a label with an impossible diagonal)
    counts as no substitution.
    """
    try:
        if maximizing:
            fs = all_shape_bijections(p, q)
            if not fs:
                return False
            score = max(pattern_substitution_score(m, p, q, f) for f in fs)
        else:
            f = shape_isomorphic(p, q)
            if f is None:
                return False
            score = pattern_substitution_score(m, p, q, f)
    except UndefinedSubstitution:
        return False
    return score >= tau / 100.0
