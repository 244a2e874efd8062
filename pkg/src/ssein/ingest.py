"""Structure-file and family-index ingestion.

Parses fixed-column PDB text (ATOM / HELIX / SHEET records) into validated
records carrying everything downstream stages need: Cα coordinates, backbone
dihedrals, Kyte-Doolittle hydrophobicity and secondary-structure membership.
Only the first chain and the first model of a file are read.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, NamedTuple, Optional

Vec3 = tuple[float, float, float]

# Kyte-Doolittle hydropathy values for the 20 standard residues.
KYTE_DOOLITTLE: dict[str, float] = {
    "A": 1.8, "R": -4.5, "N": -3.5, "D": -3.5, "C": 2.5,
    "Q": -3.5, "E": -3.5, "G": -0.4, "H": -3.2, "I": 4.5,
    "L": 3.8, "K": -3.9, "M": 1.9, "F": 2.8, "P": -1.6,
    "S": -0.8, "T": -0.7, "W": -0.9, "Y": -1.3, "V": 4.2,
}

THREE_TO_ONE: dict[str, str] = {
    "ALA": "A", "ARG": "R", "ASN": "N", "ASP": "D", "CYS": "C",
    "GLN": "Q", "GLU": "E", "GLY": "G", "HIS": "H", "ILE": "I",
    "LEU": "L", "LYS": "K", "MET": "M", "PHE": "F", "PRO": "P",
    "SER": "S", "THR": "T", "TRP": "W", "TYR": "Y", "VAL": "V",
}

ONE_TO_THREE: dict[str, str] = {v: k for k, v in THREE_TO_ONE.items()}


class PdbParseError(ValueError):
    """Malformed structure-file record; carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class EmptyStructureError(ValueError):
    """Structure text contained no usable Cα atoms."""


class FamilyIndexError(ValueError):
    """Malformed or degenerate family index file."""


def assign_hydrophobicity(code: str) -> float:
    """Kyte-Doolittle hydropathy for a one-letter residue code."""
    try:
        return KYTE_DOOLITTLE[code]
    except KeyError:
        raise ValueError(f"unknown amino-acid code {code!r}") from None


@dataclass(frozen=True)
class Residue:
    """One residue: sequence position, identity, Cα position and features."""

    index: int
    code: str
    ca: Vec3
    phi: Optional[float] = None
    psi: Optional[float] = None
    hydrophobicity: float = 0.0
    sse_id: Optional[str] = None

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"residue index must be >= 1, got {self.index}")
        if self.code not in KYTE_DOOLITTLE:
            raise ValueError(f"unknown amino-acid code {self.code!r}")
        if len(self.ca) != 3 or not all(math.isfinite(c) for c in self.ca):
            raise ValueError(f"non-finite Cα coordinates for residue {self.index}")
        for name, angle in (("phi", self.phi), ("psi", self.psi)):
            if angle is not None and not -180.0 <= angle <= 180.0:
                raise ValueError(f"{name} out of [-180, 180]: {angle}")


@dataclass(frozen=True)
class SseAnnotation:
    """A helix or strand covering an inclusive residue-index range."""

    sse_id: str
    kind: str  # "helix" | "strand"
    first_residue: int
    last_residue: int

    def __post_init__(self):
        if self.kind not in ("helix", "strand"):
            raise ValueError(f"kind must be helix or strand, got {self.kind!r}")
        if self.first_residue > self.last_residue:
            raise ValueError(
                f"SSE {self.sse_id}: first {self.first_residue} > last {self.last_residue}"
            )

    @property
    def size(self) -> int:
        return self.last_residue - self.first_residue + 1


@dataclass(frozen=True)
class ProteinStructure:
    id: str
    residues: tuple[Residue, ...]
    sse_list: tuple[SseAnnotation, ...]

    def __post_init__(self):
        indices = [r.index for r in self.residues]
        if indices != list(range(1, len(indices) + 1)):
            raise ValueError("residue indices must be contiguous starting at 1")
        known = {a.sse_id for a in self.sse_list}
        for r in self.residues:
            if r.sse_id is not None and r.sse_id not in known:
                raise ValueError(f"residue {r.index} references unknown SSE {r.sse_id}")
        covered: set[int] = set()
        for a in self.sse_list:
            span = set(range(a.first_residue, a.last_residue + 1))
            if covered & span:
                raise ValueError(f"SSE {a.sse_id} overlaps another annotation")
            if a.last_residue > len(self.residues):
                raise ValueError(f"SSE {a.sse_id} range exceeds residue count")
            covered |= span

    def __len__(self) -> int:
        return len(self.residues)

    def sse_sizes(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.sse_list)


class BackboneAtoms(NamedTuple):
    """N / Cα / C coordinates of one residue; any atom may be missing."""

    n: Optional[Vec3]
    ca: Optional[Vec3]
    c: Optional[Vec3]


@dataclass(frozen=True)
class FamilyEntry:
    protein_id: str
    path: str
    sse_count: int


@dataclass(frozen=True)
class FamilyIndex:
    family_id: str
    entries: tuple[FamilyEntry, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for e in self.entries:
            if e.sse_count < 1:
                raise ValueError(f"{e.protein_id}: sse_count must be >= 1")
            if e.protein_id in seen:
                raise ValueError(f"duplicate protein_id {e.protein_id!r}")
            seen.add(e.protein_id)


@dataclass(frozen=True)
class PdbParseResult:
    """Full parse output: structure plus backbone atoms and drop counts."""

    structure: ProteinStructure
    backbone: dict[int, BackboneAtoms] = field(default_factory=dict)
    dropped_residues: int = 0
    skipped_annotations: int = 0


def _parse_float(text: str, line_no: int, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise PdbParseError(line_no, f"cannot parse {what} from {text.strip()!r}") from None


def _parse_int(text: str, line_no: int, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise PdbParseError(line_no, f"cannot parse {what} from {text.strip()!r}") from None


def parse_pdb_detailed(text: str, protein_id: str = "unknown") -> PdbParseResult:
    """Parse PDB text into a structure, backbone table and drop counters.

    First chain, first model only.  A residue enters the structure iff it has
    a Cα atom and a standard residue name; others are counted and dropped.
    Duplicate atom records (alternate locations) resolve to the first
    occurrence.
    """
    atoms: dict[int, dict[str, Vec3]] = {}
    resnames: dict[int, str] = {}
    order: list[int] = []
    helices: list[tuple[str, int, int]] = []
    strands: list[tuple[str, int, int]] = []
    chain: Optional[str] = None
    past_first_model = False

    for line_no, line in enumerate(text.splitlines(), start=1):
        record = line[:6]
        if record == "ENDMDL":
            past_first_model = True
        elif record.startswith("HELIX"):
            if len(line) < 37:
                raise PdbParseError(line_no, "HELIX record too short")
            helix_chain = line[19]
            first = _parse_int(line[21:25], line_no, "HELIX initial residue")
            last = _parse_int(line[33:37], line_no, "HELIX final residue")
            helices.append((helix_chain, first, last))
        elif record.startswith("SHEET"):
            if len(line) < 37:
                raise PdbParseError(line_no, "SHEET record too short")
            sheet_chain = line[21]
            first = _parse_int(line[22:26], line_no, "SHEET initial residue")
            last = _parse_int(line[33:37], line_no, "SHEET final residue")
            strands.append((sheet_chain, first, last))
        elif record == "ATOM  " and not past_first_model:
            if len(line) < 54:
                raise PdbParseError(line_no, "ATOM record too short")
            atom_chain = line[21]
            if chain is None:
                chain = atom_chain
            if atom_chain != chain:
                continue
            name = line[12:16].strip()
            if name not in ("N", "CA", "C"):
                continue
            res_seq = _parse_int(line[22:26], line_no, "residue number")
            x = _parse_float(line[30:38], line_no, "x coordinate")
            y = _parse_float(line[38:46], line_no, "y coordinate")
            z = _parse_float(line[46:54], line_no, "z coordinate")
            if res_seq not in atoms:
                atoms[res_seq] = {}
                resnames[res_seq] = line[17:20].strip()
                order.append(res_seq)
            atoms[res_seq].setdefault(name, (x, y, z))

    dropped = 0
    kept: list[int] = []
    for res_seq in order:
        code = THREE_TO_ONE.get(resnames[res_seq])
        if code is None or "CA" not in atoms[res_seq]:
            dropped += 1
            continue
        kept.append(res_seq)

    if not kept:
        raise EmptyStructureError(f"{protein_id}: no Cα atoms found")

    index_of = {res_seq: i + 1 for i, res_seq in enumerate(kept)}

    annotations: list[SseAnnotation] = []
    skipped = 0
    covered: set[int] = set()
    records = [(c, f, l, "helix") for c, f, l in helices]
    records += [(c, f, l, "strand") for c, f, l in strands]
    counters = {"helix": 0, "strand": 0}
    for rec_chain, first_seq, last_seq, kind in records:
        if rec_chain not in (" ", chain):
            skipped += 1
            continue
        members = [index_of[r] for r in kept if first_seq <= r <= last_seq]
        if not members or set(members) & covered:
            skipped += 1
            continue
        counters[kind] += 1
        sse_id = ("H" if kind == "helix" else "S") + str(counters[kind])
        annotations.append(SseAnnotation(sse_id, kind, min(members), max(members)))
        covered |= set(members)
    # Gene positions follow chain order, so annotations sort by position.
    annotations.sort(key=lambda a: a.first_residue)

    sse_of: dict[int, str] = {}
    for a in annotations:
        for i in range(a.first_residue, a.last_residue + 1):
            sse_of[i] = a.sse_id

    residues = []
    backbone: dict[int, BackboneAtoms] = {}
    for res_seq in kept:
        idx = index_of[res_seq]
        code = THREE_TO_ONE[resnames[res_seq]]
        entry = atoms[res_seq]
        residues.append(
            Residue(
                index=idx,
                code=code,
                ca=entry["CA"],
                hydrophobicity=assign_hydrophobicity(code),
                sse_id=sse_of.get(idx),
            )
        )
        backbone[idx] = BackboneAtoms(entry.get("N"), entry["CA"], entry.get("C"))

    structure = ProteinStructure(protein_id, tuple(residues), tuple(annotations))
    return PdbParseResult(structure, backbone, dropped, skipped)


def parse_pdb(text: str, protein_id: str = "unknown") -> ProteinStructure:
    """Parse PDB text into a ProteinStructure (see parse_pdb_detailed)."""
    return parse_pdb_detailed(text, protein_id).structure


def emit_pdb(structure: ProteinStructure) -> str:
    """Canonical PDB text for a structure: HELIX/SHEET records, then Cα ATOMs.

    parse_pdb of the emitted text reproduces the structure (coordinates are
    written at the format's native 3-decimal precision).
    """
    lines: list[str] = []
    helix_no = 0
    sheet_no = 0
    for a in structure.sse_list:
        first = structure.residues[a.first_residue - 1]
        last = structure.residues[a.last_residue - 1]
        if a.kind == "helix":
            helix_no += 1
            lines.append(
                f"HELIX  {helix_no:3d} {helix_no:3d} {ONE_TO_THREE[first.code]} A "
                f"{a.first_residue:4d}  {ONE_TO_THREE[last.code]} A {a.last_residue:4d}  1"
            )
        else:
            sheet_no += 1
            lines.append(
                f"SHEET  {sheet_no:3d} {sheet_no:3d} 1 {ONE_TO_THREE[first.code]} A"
                f"{a.first_residue:4d}  {ONE_TO_THREE[last.code]} A{a.last_residue:4d} 0"
            )
    for r in structure.residues:
        x, y, z = r.ca
        lines.append(
            f"ATOM  {r.index:5d}  CA  {ONE_TO_THREE[r.code]} A{r.index:4d}    "
            f"{x:8.3f}{y:8.3f}{z:8.3f}  1.00  0.00           C"
        )
    lines.append("END")
    return "\n".join(lines) + "\n"


def _sub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _dot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def dihedral_angle(p0: Vec3, p1: Vec3, p2: Vec3, p3: Vec3) -> float:
    """Signed dihedral of the p0-p1-p2-p3 chain, in degrees in [-180, 180]."""
    b0 = _sub(p0, p1)
    b1 = _sub(p2, p1)
    b2 = _sub(p3, p2)
    norm = math.sqrt(_dot(b1, b1))
    if norm == 0.0:
        raise ValueError("degenerate dihedral: coincident central atoms")
    b1 = (b1[0] / norm, b1[1] / norm, b1[2] / norm)
    t0 = _dot(b0, b1)
    t2 = _dot(b2, b1)
    v = _sub(b0, (t0 * b1[0], t0 * b1[1], t0 * b1[2]))
    w = _sub(b2, (t2 * b1[0], t2 * b1[1], t2 * b1[2]))
    x = _dot(v, w)
    y = _dot(_cross(b1, v), w)
    return math.degrees(math.atan2(y, x))


def compute_backbone_dihedrals(
    protein: ProteinStructure, backbone: Mapping[int, BackboneAtoms]
) -> ProteinStructure:
    """Fill phi/psi from backbone atoms; termini and gaps stay absent.

    phi(i) uses C(i-1), N(i), Cα(i), C(i); psi(i) uses N(i), Cα(i), C(i),
    N(i+1).  A missing atom leaves that residue's angle unset.
    """
    n = len(protein.residues)
    updated = []
    for r in protein.residues:
        i = r.index
        here = backbone.get(i)
        prev = backbone.get(i - 1) if i > 1 else None
        nxt = backbone.get(i + 1) if i < n else None
        phi = None
        psi = None
        if here is not None and here.n and here.ca and here.c:
            if prev is not None and prev.c:
                phi = dihedral_angle(prev.c, here.n, here.ca, here.c)
            if nxt is not None and nxt.n:
                psi = dihedral_angle(here.n, here.ca, here.c, nxt.n)
        updated.append(replace(r, phi=phi, psi=psi))
    return replace(protein, residues=tuple(updated))


def load_family_index(text: str, family_id: str = "family") -> FamilyIndex:
    """Parse a TSV family index: ``protein_id<TAB>path<TAB>sse_count`` lines.

    Blank lines and ``#`` comments are skipped.  Raises FamilyIndexError on
    malformed counts (with the line number), duplicates, or an empty index.
    """
    entries: list[FamilyEntry] = []
    seen: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise FamilyIndexError(f"line {line_no}: expected 3 tab-separated fields")
        protein_id, path, count_text = (p.strip() for p in parts)
        try:
            sse_count = int(count_text)
        except ValueError:
            raise FamilyIndexError(
                f"line {line_no}: sse_count {count_text!r} is not an integer"
            ) from None
        if sse_count < 1:
            raise FamilyIndexError(f"line {line_no}: sse_count must be >= 1")
        if protein_id in seen:
            raise FamilyIndexError(f"line {line_no}: duplicate protein_id {protein_id!r}")
        seen.add(protein_id)
        entries.append(FamilyEntry(protein_id, path, sse_count))
    if not entries:
        raise FamilyIndexError("family index has no entries")
    return FamilyIndex(family_id, tuple(entries))
