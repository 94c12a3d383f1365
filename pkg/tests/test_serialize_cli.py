"""Document round trips, parse errors, and the command-line surface."""

import json
import random
import subprocess
import sys

import pytest

from orbatlas.errors import ParseError
from orbatlas.gallery import cone, football, global_quotient, point_atlas
from orbatlas.morita import pushforward_atlas
from orbatlas.serialize import (
    atlas_from_doc,
    canonical_bytes,
    cell_from_doc,
    cyc_from_doc,
    groupoid_from_doc,
    load_document,
    parse_atlas,
    serialize,
    system_from_doc,
    witnesses_from_doc,
    witnesses_to_doc,
)
from orbatlas.systems import rotation_fixture
from orbatlas.translation import TranslationGroupoid


class TestRoundTrips:
    @pytest.mark.parametrize(
        "make",
        [
            lambda: cone(3),
            lambda: football(2, 3),
            lambda: point_atlas(),
            lambda: global_quotient(2, 2),
            lambda: pushforward_atlas({"north": "south", "south": "north", "glue": "glue"}, football(2, 3)),
        ],
    )
    def test_atlas_bit_exact(self, make):
        atlas = make()
        raw = serialize(atlas)
        back = atlas_from_doc(json.loads(raw))
        assert serialize(back) == raw
        assert back.charts.keys() == atlas.charts.keys()
        assert back.reps.keys() == atlas.reps.keys()

    def test_non_canonical_input_is_canonicalized(self):
        # pre-reduction accepted: zeta_12^4 given in the raw power basis reduces
        # to its canonical form below the cyclotomic degree
        from orbatlas.field import CycNum

        raw = ["0/1"] * 12
        raw[4] = "1/1"
        parsed = cyc_from_doc(12, raw)
        assert parsed == CycNum.zeta(12, 4)
        assert all(c == 0 for c in parsed.coeffs[4:])
        atlas = cone(3)
        doc = json.loads(serialize(atlas))
        messy = json.dumps(doc, indent=2)  # non-canonical layout
        back = atlas_from_doc(json.loads(messy))
        assert serialize(back) == serialize(atlas)

    def test_groupoid_documents(self):
        tg = TranslationGroupoid(cone(3))
        raw = serialize(tg)
        back = groupoid_from_doc(json.loads(raw))
        assert serialize(back) == raw

    def test_groupoid_component_table_checked(self):
        tg = TranslationGroupoid(cone(3))
        doc = json.loads(serialize(tg))
        doc["components"] = doc["components"][:-1]
        with pytest.raises(ParseError):
            groupoid_from_doc(doc)

    def test_system_and_cell_documents(self):
        fx = rotation_fixture(cone(3), random.Random(0))
        raw = serialize(fx.f1)
        assert serialize(system_from_doc(json.loads(raw))) == raw
        rawc = serialize(fx.delta)
        assert serialize(cell_from_doc(json.loads(rawc))) == rawc

    def test_system_with_path_references(self, tmp_path):
        from orbatlas.serialize import doc_hash

        fx = rotation_fixture(cone(3), random.Random(1))
        doc = json.loads(serialize(fx.f1))
        atlas_doc = doc["src"]["inline"]
        (tmp_path / "base.json").write_bytes(canonical_bytes(atlas_doc))
        ref = {"path": "base.json", "hash": doc_hash(atlas_doc)}
        doc["src"] = ref
        doc["dst"] = dict(ref)
        back = system_from_doc(doc, base_dir=tmp_path)
        assert serialize(back) == serialize(fx.f1)
        doc["src"] = {"path": "base.json", "hash": "0" * 64}
        with pytest.raises(ParseError):
            system_from_doc(doc, base_dir=tmp_path)

    def test_witness_documents(self):
        from orbatlas.gallery import cone_pair

        u1, u2, ws = cone_pair(3)
        doc = witnesses_to_doc(ws)
        back = witnesses_from_doc(json.loads(canonical_bytes(doc)), u1.conductor)
        assert canonical_bytes(witnesses_to_doc(back)) == canonical_bytes(doc)


class TestGalleryParams:
    def test_unsupported_order_rejected(self):
        from orbatlas.errors import UnsupportedParamsError

        with pytest.raises(UnsupportedParamsError):
            cone(5)
        with pytest.raises(UnsupportedParamsError):
            cone(3, conductor=4)


class TestParseErrors:
    def test_zero_denominator(self):
        with pytest.raises(ParseError):
            cyc_from_doc(3, "1/0")

    def test_not_an_atlas(self):
        with pytest.raises(ParseError):
            atlas_from_doc({"kind": "something"})

    def test_bad_json_file(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text("{not json")
        with pytest.raises(ParseError):
            parse_atlas(p)

    def test_hash_mismatch(self):
        tg = TranslationGroupoid(cone(3))
        doc = json.loads(serialize(tg))
        doc["atlas_hash"] = "0" * 64
        with pytest.raises(ParseError):
            groupoid_from_doc(doc)


def run_cli(*argv, cwd):
    return subprocess.run(
        [sys.executable, "-m", "orbatlas.cli", *argv],
        capture_output=True,
        text=True,
        cwd=cwd,
        timeout=600,
    )


@pytest.fixture(scope="module")
def cli_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    out = run_cli("gallery", "cone", "--p", "3", "--out", "cone3.json", cwd=d)
    assert out.returncode == 0, out.stderr
    return d


class TestCli:
    def test_gallery_and_validate(self, cli_dir):
        out = run_cli("validate", "cone3.json", "--samples", "20", cwd=cli_dir)
        assert out.returncode == 0
        assert "verdict: pass" in out.stdout

    def test_groupoid_suite(self, cli_dir):
        out = run_cli(
            "groupoid", "cone3.json", "--samples", "40", "--seed", "1",
            "--out", "report.json", cwd=cli_dir,
        )
        assert out.returncode == 0, out.stdout
        doc = json.loads((cli_dir / "report.json").read_text())
        assert doc["verdict"] == "pass"
        assert doc["counterexamples"] == []

    def test_laws(self, cli_dir):
        out = run_cli("laws", "cone3.json", "--samples", "100", "--seed", "2", cwd=cli_dir)
        assert out.returncode == 0
        assert "interchange" in out.stdout

    def test_morita_pair(self, cli_dir, sub_full_cone3):
        sub, full = sub_full_cone3
        (cli_dir / "sub.json").write_bytes(serialize(sub))
        (cli_dir / "full.json").write_bytes(serialize(full))
        out = run_cli("morita", "sub.json", "full.json", "--samples", "30", cwd=cli_dir)
        assert out.returncode == 0, out.stdout
        assert "verdict: pass" in out.stdout

    def test_reconstruct(self, cli_dir):
        out = run_cli("reconstruct", "cone3.json", "--samples", "60", cwd=cli_dir)
        assert out.returncode == 0, out.stdout

    def test_bijection_inequivalent_exits_zero(self, cli_dir):
        out = run_cli("gallery", "cone", "--p", "2", "--conductor", "6", "--out", "cone2.json", cwd=cli_dir)
        assert out.returncode == 0
        out = run_cli("gallery", "cone", "--p", "3", "--conductor", "6", "--out", "cone3c6.json", cwd=cli_dir)
        assert out.returncode == 0
        out = run_cli(
            "bijection", "cone3c6.json", "cone2.json", "--samples", "10",
            "--out", "bij.json", cwd=cli_dir,
        )
        assert out.returncode == 0, out.stdout
        doc = json.loads((cli_dir / "bij.json").read_text())
        assert doc["atlas_side"] == "inequivalent"
        assert doc["groupoid_side"] == "inequivalent"
        assert doc["agreement"] is True

    def test_bijection_with_witness_file(self, cli_dir):
        from orbatlas.gallery import cone_pair

        u1, u2, ws = cone_pair(3)
        (cli_dir / "u1.json").write_bytes(serialize(u1))
        (cli_dir / "u2.json").write_bytes(serialize(u2))
        (cli_dir / "w.json").write_bytes(canonical_bytes(witnesses_to_doc(ws)))
        out = run_cli(
            "bijection", "u1.json", "u2.json", "--witness", "w.json",
            "--samples", "15", cwd=cli_dir,
        )
        assert out.returncode == 0, out.stdout
        assert "atlas side: equivalent" in out.stdout
        assert "groupoid side: equivalent" in out.stdout

    def test_determinism(self, cli_dir):
        a = run_cli("groupoid", "cone3.json", "--samples", "25", "--seed", "7", cwd=cli_dir)
        b = run_cli("groupoid", "cone3.json", "--samples", "25", "--seed", "7", cwd=cli_dir)
        assert a.stdout == b.stdout

    def test_usage_error_exit_code(self, cli_dir):
        out = run_cli("bogus-subcommand", cwd=cli_dir)
        assert out.returncode == 2

    def test_missing_file_is_parse_error(self, cli_dir):
        out = run_cli("validate", "missing.json", cwd=cli_dir)
        assert out.returncode == 2

    def test_samples_environment_variable(self, cli_dir):
        import os
        import subprocess

        env = dict(os.environ, ORBATLAS_SAMPLES="17")
        out = subprocess.run(
            [sys.executable, "-c", "from orbatlas import cli; print(cli.DEFAULT_SAMPLES)"],
            capture_output=True, text=True, env=env, timeout=120,
        )
        assert out.stdout.strip() == "17"
