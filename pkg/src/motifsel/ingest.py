"""Residue tables to amino-acid contact graphs.

Input is either a residue CSV (``position,code,x,y,z``; ``#`` comments, an
optional ``# class pos|neg`` line) or the CA ``ATOM`` records of a PDB file.
Two residues are linked when their CA atoms are within ``delta`` angstroms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .graph import LabeledGraph
from .substitution import AMINO_ACIDS

THREE_TO_ONE = {
    "ALA": "A", "ARG": "R", "ASN": "N", "ASP": "D", "CYS": "C", "GLN": "Q", "GLU": "E",
    "GLY": "G", "HIS": "H", "ILE": "I", "LEU": "L", "LYS": "K", "MET": "M", "PHE": "F",
    "PRO": "P", "SER": "S", "THR": "T", "TRP": "W", "TYR": "Y", "VAL": "V",
}


class ResidueParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, source: str = "<text>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class ResidueRecord:
    position: int
    amino_acid: str
    ca: Tuple[float, float, float]


@dataclass(frozen=True)
class ContactConfig:
    delta: float = 7.0

    def __post_init__(self):
        if not (self.delta > 0) or math.isinf(self.delta):
            raise ValueError(f"delta must be a positive distance, got {self.delta}")


def _class_tag(text: str) -> Optional[str]:
    for line in text.splitlines():
        words = line.lstrip("#").split() if line.startswith("#") else []
        if len(words) == 2 and words[0] == "class":
            return words[1]
    return None


def parse_residues(text: str, source: str = "<text>") -> List[ResidueRecord]:
    if any(line.startswith(("ATOM", "HETATM")) for line in text.splitlines()):
        return _parse_pdb(text, source)
    records: List[ResidueRecord] = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if not records and parts[0].lower() in ("position", "pos", "resid"):
            continue
        if len(parts) != 5:
            raise ResidueParseError(f"expected 5 comma-separated fields, got {len(parts)}",
                                    lineno, source)
        try:
            pos = int(parts[0])
        except ValueError:
            raise ResidueParseError(f"bad position {parts[0]!r}", lineno, source) from None
        aa = parts[1].upper()
        if len(aa) != 1 or aa not in AMINO_ACIDS:
            raise ResidueParseError(f"{parts[1]!r} is not an amino-acid code", lineno, source)
        try:
            xyz = tuple(float(v) for v in parts[2:])
        except ValueError:
            raise ResidueParseError("non-numeric coordinate", lineno, source) from None
        if not all(math.isfinite(v) for v in xyz):
            raise ResidueParseError("coordinates must be finite", lineno, source)
        if pos in seen:
            raise ResidueParseError(f"duplicate position {pos}", lineno, source)
        seen.add(pos)
        records.append(ResidueRecord(pos, aa, xyz))
    records.sort(key=lambda r: r.position)
    return records


def _parse_pdb(text: str, source: str) -> List[ResidueRecord]:
    """CA atoms of the first model; alternate locations other than A are skipped."""
    records: List[ResidueRecord] = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.startswith("ENDMDL"):
            break
        if not line.startswith("ATOM") or line[12:16].strip() != "CA":
            continue
        if line[16] not in (" ", "A"):
            continue
        res = line[17:20].strip()
        aa = THREE_TO_ONE.get(res)
        if aa is None:
            raise ResidueParseError(f"{res!r} is not a standard amino acid", lineno, source)
        key = (line[21], line[22:27])
        if key in seen:
            raise ResidueParseError(f"duplicate residue {line[21]}{line[22:27].strip()}",
                                    lineno, source)
        seen.add(key)
        try:
            xyz = (float(line[30:38]), float(line[38:46]), float(line[46:54]))
        except ValueError:
            raise ResidueParseError("non-numeric coordinate", lineno, source) from None
        records.append(ResidueRecord(len(records) + 1, aa, xyz))
    return records


def build_contact_graph(residues: List[ResidueRecord], cfg: ContactConfig = ContactConfig(),
                        id: str = "", tag: Optional[str] = None) -> LabeledGraph:
    if not residues:
        raise ValueError("need at least one residue")
    xyz = np.array([r.ca for r in residues], dtype=float)
    dist = np.sqrt(((xyz[:, None, :] - xyz[None, :, :]) ** 2).sum(axis=2))
    iu, ju = np.nonzero(np.triu(dist <= cfg.delta, k=1))
    return LabeledGraph([r.amino_acid for r in residues], zip(iu.tolist(), ju.tolist()),
                        id=id, tag=tag)


def graph_from_text(text: str, cfg: ContactConfig = ContactConfig(), id: str = "",
                    tag: Optional[str] = None, source: str = "<text>") -> LabeledGraph:
    residues = parse_residues(text, source)
    return build_contact_graph(residues, cfg, id=id, tag=tag or _class_tag(text))
