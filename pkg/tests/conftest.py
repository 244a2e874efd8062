"""Shared geometry builders for the test suite.

Backbones are grown atom by atom from internal coordinates (bond length,
bond angle, torsion), so fixtures have exact, known dihedrals.  The
two-helix protein packs two ideal helices side by side with a short loop,
giving a realistic little SSE-IN with both intra and shortcut contacts.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

# Standard backbone internal coordinates.
BOND_N_CA = 1.458
BOND_CA_C = 1.525
BOND_C_N = 1.329
ANGLE_N_CA_C = 111.2
ANGLE_CA_C_N = 116.2
ANGLE_C_N_CA = 121.7

SEQUENCE = "ALAVKLIGERMNDFYQWHST"  # cycled for fixture residue names

THREE = {
    "A": "ALA", "L": "LEU", "V": "VAL", "K": "LYS", "I": "ILE", "G": "GLY",
    "E": "GLU", "R": "ARG", "M": "MET", "N": "ASN", "D": "ASP", "F": "PHE",
    "Y": "TYR", "Q": "GLN", "W": "TRP", "H": "HIS", "S": "SER", "T": "THR",
}


def place_atom(a, b, c, bond_length, bond_angle_deg, torsion_deg):
    """Place d with |cd| = bond_length, angle(b,c,d) and dihedral(a,b,c,d)."""
    a, b, c = np.asarray(a, float), np.asarray(b, float), np.asarray(c, float)
    theta = math.radians(bond_angle_deg)
    chi = math.radians(torsion_deg)
    bc = c - b
    bc /= np.linalg.norm(bc)
    n = np.cross(b - a, bc)
    n /= np.linalg.norm(n)
    m = np.cross(n, bc)
    d = np.array(
        [
            -bond_length * math.cos(theta),
            bond_length * math.sin(theta) * math.cos(chi),
            bond_length * math.sin(theta) * math.sin(chi),
        ]
    )
    return c + d[0] * bc + d[1] * m + d[2] * n


def build_chain(n_res, phi=-57.0, psi=-47.0, omega=180.0):
    """Backbone (N, CA, C) per residue with constant torsions."""
    n0 = np.array([0.0, 0.0, 0.0])
    ca0 = np.array([BOND_N_CA, 0.0, 0.0])
    c0 = place_atom(np.array([0.0, 1.0, 0.0]), n0, ca0, BOND_CA_C, ANGLE_N_CA_C, 33.0)
    atoms = [(n0, ca0, c0)]
    for _ in range(1, n_res):
        n_next = place_atom(*atoms[-1], BOND_C_N, ANGLE_CA_C_N, psi)
        ca_next = place_atom(atoms[-1][1], atoms[-1][2], n_next, BOND_N_CA, ANGLE_C_N_CA, omega)
        c_next = place_atom(atoms[-1][2], n_next, ca_next, BOND_CA_C, ANGLE_N_CA_C, phi)
        atoms.append((n_next, ca_next, c_next))
    return atoms


def atom_line(serial, name, res3, chain, res_seq, xyz):
    pad = f"{name:<3s}"
    return (
        f"ATOM  {serial:5d}  {pad} {res3} {chain}{res_seq:4d}    "
        f"{xyz[0]:8.3f}{xyz[1]:8.3f}{xyz[2]:8.3f}  1.00  0.00           "
        f"{name[0]}"
    )


def helix_record(serial, res3_first, res3_last, chain, first, last):
    return (
        f"HELIX  {serial:3d} {serial:3d} {res3_first} {chain} {first:4d}  "
        f"{res3_last} {chain} {last:4d}  1"
    )


def residue_name(index):
    return THREE[SEQUENCE[(index - 1) % len(SEQUENCE)]]


def multi_helix_protein(n_helices=2, jitter=None, helix_len=10, loop_len=4, separation=11.0):
    """PDB text for a row of packed ideal helices joined by loops.

    Helix k sits at k * separation along the packing direction, so only
    consecutive helices are in contact range.  Returns (text, n_residues).
    `jitter` may be an np.random.Generator used to displace every atom by
    up to ~0.2 Å, producing family 'homologues'.
    """
    helix = build_chain(helix_len)
    cas = np.array([a[1] for a in helix])
    axis = cas[-1] - cas[0]
    axis /= np.linalg.norm(axis)
    perp = np.cross(axis, [0.0, 0.0, 1.0])
    perp /= np.linalg.norm(perp)
    step = perp * separation + axis * 1.0

    residues = []  # (res_seq, dict name -> xyz)
    helix_ranges = []
    seq = 0
    for h in range(n_helices):
        offset = step * h
        first = seq + 1
        for n, ca, c in helix:
            seq += 1
            residues.append((seq, {"N": n + offset, "CA": ca + offset, "C": c + offset}))
        helix_ranges.append((first, seq))
        if h < n_helices - 1:
            anchor_a = helix[-1][1] + offset
            anchor_b = helix[0][1] + step * (h + 1)
            for i in range(1, loop_len + 1):
                seq += 1
                t = i / (loop_len + 1)
                ca = (
                    anchor_a
                    + (anchor_b - anchor_a) * t
                    + np.array([0.0, 0.0, 3.0 * math.sin(math.pi * t)])
                )
                residues.append((seq, {"CA": ca}))

    if jitter is not None:
        residues = [
            (rs, {name: xyz + jitter.uniform(-0.2, 0.2, size=3) for name, xyz in atoms.items()})
            for rs, atoms in residues
        ]

    lines = [
        helix_record(k, residue_name(first), residue_name(last), "A", first, last)
        for k, (first, last) in enumerate(helix_ranges, start=1)
    ]
    serial = 0
    for res_seq, atoms in residues:
        for name in ("N", "CA", "C"):
            if name in atoms:
                serial += 1
                lines.append(atom_line(serial, name, residue_name(res_seq), "A", res_seq, atoms[name]))
    lines.append("END")
    return "\n".join(lines) + "\n", seq


def two_helix_protein(jitter=None, helix_len=10, loop_len=4, separation=11.0):
    return multi_helix_protein(2, jitter, helix_len, loop_len, separation)


def write_family(tmp_path: Path, n_templates: int = 3, seed: int = 9) -> tuple[Path, Path]:
    """Write a query PDB plus a jittered template family; returns
    (query_path, index_path)."""
    rng = np.random.default_rng(seed)
    query_text, _ = two_helix_protein()
    query_path = tmp_path / "query.pdb"
    query_path.write_text(query_text)
    index_lines = []
    for t in range(1, n_templates + 1):
        text, _ = two_helix_protein(jitter=rng)
        path = tmp_path / f"tmpl{t}.pdb"
        path.write_text(text)
        index_lines.append(f"tmpl{t}\t{path.name}\t2")
    index_path = tmp_path / "family.tsv"
    index_path.write_text("# protein_id\tpath\tsse_count\n" + "\n".join(index_lines) + "\n")
    return query_path, index_path
