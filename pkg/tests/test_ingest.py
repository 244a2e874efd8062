import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import atom_line, build_chain, helix_record, residue_name, two_helix_protein
from ssein.ingest import (
    EmptyStructureError,
    FamilyIndexError,
    PdbParseError,
    assign_hydrophobicity,
    compute_backbone_dihedrals,
    dihedral_angle,
    emit_pdb,
    load_family_index,
    parse_pdb,
    parse_pdb_detailed,
)


def _ca_text(coords, start=1):
    lines = [
        atom_line(i + 1, "CA", residue_name(start + i), "A", start + i, xyz)
        for i, xyz in enumerate(coords)
    ]
    return "\n".join(lines) + "\n"


class TestParsePdb:
    def test_minimal_two_residues(self):
        text = _ca_text([(0.0, 0.0, 0.0), (3.8, 0.0, 0.0)])
        structure = parse_pdb(text)
        assert len(structure.residues) == 2
        assert structure.residues[0].ca == (0.0, 0.0, 0.0)
        assert structure.residues[1].ca == (3.8, 0.0, 0.0)
        assert structure.residues[0].index == 1

    def test_helix_record_size(self):
        text = helix_record(1, residue_name(2), residue_name(5), "A", 2, 5) + "\n"
        text += _ca_text([(float(i), 0.0, 0.0) for i in range(6)])
        structure = parse_pdb(text)
        assert len(structure.sse_list) == 1
        helix = structure.sse_list[0]
        assert helix.kind == "helix"
        assert (helix.first_residue, helix.last_residue) == (2, 5)
        assert helix.size == 4

    def test_realistic_two_helix_file(self):
        text, n = two_helix_protein()
        structure = parse_pdb(text)
        assert len(structure.residues) == n
        assert len(structure.sse_list) >= 1
        assert {a.kind for a in structure.sse_list} == {"helix"}

    def test_malformed_coordinate_names_line(self):
        good = _ca_text([(0.0, 0.0, 0.0), (3.8, 0.0, 0.0)])
        lines = good.splitlines()
        lines[1] = lines[1][:30] + "   xx.xxx" + lines[1][39:]
        with pytest.raises(PdbParseError) as err:
            parse_pdb("\n".join(lines))
        assert err.value.line_number == 2

    def test_no_ca_atoms(self):
        with pytest.raises(EmptyStructureError):
            parse_pdb("REMARK nothing here\nEND\n")

    def test_altloc_first_occurrence_wins(self):
        line_a = atom_line(1, "CA", "ALA", "A", 1, (1.0, 0.0, 0.0))
        line_b = atom_line(2, "CA", "ALA", "A", 1, (9.0, 0.0, 0.0))
        line_a = line_a[:16] + "A" + line_a[17:]
        line_b = line_b[:16] + "B" + line_b[17:]
        structure = parse_pdb(line_a + "\n" + line_b + "\n")
        assert len(structure.residues) == 1
        assert structure.residues[0].ca == (1.0, 0.0, 0.0)

    def test_first_chain_only(self):
        text = _ca_text([(0.0, 0.0, 0.0)])
        other = atom_line(2, "CA", "GLY", "B", 1, (5.0, 0.0, 0.0))
        structure = parse_pdb(text + other + "\n")
        assert len(structure.residues) == 1
        assert structure.residues[0].code == "A"

    def test_first_model_only(self):
        text = _ca_text([(0.0, 0.0, 0.0)]) + "ENDMDL\n"
        text += atom_line(9, "CA", "GLY", "A", 7, (5.0, 0.0, 0.0)) + "\n"
        structure = parse_pdb(text)
        assert len(structure.residues) == 1

    def test_unknown_resname_dropped_with_count(self):
        text = _ca_text([(0.0, 0.0, 0.0)])
        text += atom_line(2, "CA", "UNK", "A", 2, (4.0, 0.0, 0.0)) + "\n"
        result = parse_pdb_detailed(text)
        assert len(result.structure.residues) == 1
        assert result.dropped_residues == 1

    def test_roundtrip_on_fixture(self):
        text, _ = two_helix_protein()
        structure = parse_pdb(text, "fix")
        again = parse_pdb(emit_pdb(structure), "fix")
        assert again == structure

    def test_sheet_record_and_strand_roundtrip(self):
        sheet = "SHEET    1   A 1 ALA A   2  LEU A   4  0"
        text = sheet + "\n" + _ca_text([(float(i), 0.0, 0.0) for i in range(6)])
        structure = parse_pdb(text, "s")
        strand = structure.sse_list[0]
        assert strand.kind == "strand"
        assert (strand.first_residue, strand.last_residue) == (2, 4)
        assert parse_pdb(emit_pdb(structure), "s") == structure


class TestDihedrals:
    def test_trans_is_180(self):
        angle = dihedral_angle((0, 1, 0), (0, 0, 0), (1, 0, 0), (1, -1, 0))
        assert angle == pytest.approx(180.0)

    def test_mirror_negates(self):
        pts = [(0.3, 1.1, 0.2), (0.0, 0.1, -0.4), (1.2, -0.2, 0.3), (1.8, -1.0, -0.9)]
        mirrored = [(x, y, -z) for x, y, z in pts]
        assert dihedral_angle(*mirrored) == pytest.approx(-dihedral_angle(*pts), abs=1e-9)

    def test_ideal_helix_angles(self):
        chain = build_chain(8, phi=-57.0, psi=-47.0)

        # independent oracle: normal-vector formulation
        def oracle(p0, p1, p2, p3):
            p0, p1, p2, p3 = (np.asarray(p) for p in (p0, p1, p2, p3))
            b1, b2, b3 = p1 - p0, p2 - p1, p3 - p2
            n1 = np.cross(b1, b2)
            n2 = np.cross(b2, b3)
            x = float(np.dot(n1, n2))
            y = float(np.dot(np.cross(n1, n2), b2 / np.linalg.norm(b2)))
            return math.degrees(math.atan2(y, x))

        for i in range(1, len(chain) - 1):
            phi = dihedral_angle(
                tuple(chain[i - 1][2]), tuple(chain[i][0]), tuple(chain[i][1]), tuple(chain[i][2])
            )
            psi = dihedral_angle(
                tuple(chain[i][0]), tuple(chain[i][1]), tuple(chain[i][2]), tuple(chain[i + 1][0])
            )
            assert phi == pytest.approx(-57.0, abs=2.0)
            assert psi == pytest.approx(-47.0, abs=2.0)
            assert phi == pytest.approx(
                oracle(chain[i - 1][2], chain[i][0], chain[i][1], chain[i][2]), abs=1e-9
            )

    def test_compute_backbone_dihedrals_on_fixture(self):
        text, _ = two_helix_protein()
        result = parse_pdb_detailed(text)
        protein = compute_backbone_dihedrals(result.structure, result.backbone)
        assert protein.residues[0].phi is None  # chain start
        assert protein.residues[-1].psi is None  # chain end
        interior = protein.residues[2]
        assert interior.phi == pytest.approx(-57.0, abs=1.0)
        assert interior.psi == pytest.approx(-47.0, abs=1.0)

    def test_structure_level_antisymmetry_under_reflection(self):
        text, _ = two_helix_protein()
        result = parse_pdb_detailed(text)
        protein = compute_backbone_dihedrals(result.structure, result.backbone)
        from ssein.ingest import BackboneAtoms

        def flip(xyz):
            return None if xyz is None else (xyz[0], xyz[1], -xyz[2])

        mirrored_backbone = {
            i: BackboneAtoms(flip(b.n), flip(b.ca), flip(b.c))
            for i, b in result.backbone.items()
        }
        mirrored = compute_backbone_dihedrals(result.structure, mirrored_backbone)
        for original, reflected in zip(protein.residues, mirrored.residues):
            for name in ("phi", "psi"):
                a, b = getattr(original, name), getattr(reflected, name)
                assert (a is None) == (b is None)
                if a is not None:
                    assert b == pytest.approx(-a, abs=1e-9)

    def test_missing_backbone_atom_leaves_angle_absent(self):
        text, _ = two_helix_protein()
        result = parse_pdb_detailed(text)
        loop_residue = result.structure.residues[11]  # loop: CA only
        assert result.backbone[loop_residue.index].n is None
        protein = compute_backbone_dihedrals(result.structure, result.backbone)
        assert protein.residues[11].phi is None
        assert protein.residues[11].psi is None

    @given(
        st.lists(
            st.tuples(
                st.floats(-10, 10, allow_nan=False),
                st.floats(-10, 10, allow_nan=False),
                st.floats(-10, 10, allow_nan=False),
            ),
            min_size=4,
            max_size=4,
        )
    )
    def test_dihedral_in_range_and_antisymmetric(self, pts):
        p0, p1, p2, p3 = pts
        for a, b in ((p0, p1), (p1, p2), (p2, p3)):
            assume(math.dist(a, b) > 1e-2)
        v01 = np.subtract(p1, p0)
        v12 = np.subtract(p2, p1)
        v23 = np.subtract(p3, p2)
        assume(np.linalg.norm(np.cross(v01, v12)) > 1e-2)
        assume(np.linalg.norm(np.cross(v12, v23)) > 1e-2)
        angle = dihedral_angle(p0, p1, p2, p3)
        assert -180.0 <= angle <= 180.0
        assume(abs(abs(angle) - 180.0) > 1e-6)  # keep clear of the branch cut
        mirrored = dihedral_angle(*[(x, y, -z) for x, y, z in pts])
        assert mirrored == pytest.approx(-angle, abs=1e-9)


class TestHydrophobicity:
    @pytest.mark.parametrize("code,value", [("I", 4.5), ("R", -4.5), ("G", -0.4)])
    def test_kyte_doolittle_values(self, code, value):
        assert assign_hydrophobicity(code) == value

    def test_unknown_code(self):
        with pytest.raises(ValueError):
            assign_hydrophobicity("X")


class TestFamilyIndex:
    def test_two_entries(self):
        index = load_family_index("p1\ta/p1.pdb\t4\np2\tb/p2.pdb\t5\n")
        assert len(index.entries) == 2
        assert index.entries[0].protein_id == "p1"
        assert index.entries[1].sse_count == 5

    def test_comments_and_blanks_skipped(self):
        index = load_family_index("# header\n\np1\tx.pdb\t2\n")
        assert len(index.entries) == 1

    def test_only_comments_is_empty_error(self):
        with pytest.raises(FamilyIndexError):
            load_family_index("# nothing\n# here\n")

    def test_bad_count_names_line(self):
        with pytest.raises(FamilyIndexError, match="line 2"):
            load_family_index("p1\tx.pdb\t2\np2\ty.pdb\tx\n")

    def test_duplicate_protein_id(self):
        with pytest.raises(FamilyIndexError, match="duplicate"):
            load_family_index("p1\tx.pdb\t2\np1\ty.pdb\t3\n")


@st.composite
def small_structures(draw):
    n = draw(st.integers(2, 12))
    coords = [
        (
            round(draw(st.floats(-99, 99)), 3),
            round(draw(st.floats(-99, 99)), 3),
            round(draw(st.floats(-99, 99)), 3),
        )
        for _ in range(n)
    ]
    helix_end = draw(st.integers(0, n))
    return coords, helix_end


class TestRoundTrip:
    @settings(max_examples=50)
    @given(small_structures())
    def test_parse_emit_parse_identity(self, params):
        coords, helix_end = params
        text = ""
        if helix_end >= 2:
            text += helix_record(1, residue_name(1), residue_name(helix_end), "A", 1, helix_end) + "\n"
        text += _ca_text(coords)
        structure = parse_pdb(text, "rt")
        assert parse_pdb(emit_pdb(structure), "rt") == structure
