"""Tests for record files and bundled fixtures."""

import json

import pytest

from lamtransfer.curves import EllipticCurveQ
from lamtransfer.forms import EigenformRecord, ReductionKind, ValidationError
from lamtransfer.records import (
    CurveRecord,
    ParseError,
    RecordSource,
    dump_record,
    fixture_labels,
    load_fixture,
    load_record,
    parse_record,
    save_record,
)

CURVE_TEXT = """{
  "ainvs": ["0", "1", "1", "-9", "-15"],
  "conductor": "%s",
  "label": "19a1"
}
"""

EIGENFORM_TEXT = """{
  "a_coeffs": {"2": "0", "3": "-2", "5": "3"},
  "bad_prime_kinds": {"19": "bad_multiplicative"},
  "label": "19a",
  "level": 19,
  "weight": 2
}
"""


class TestFixtures:
    def test_labels(self):
        assert fixture_labels() == ["19a1", "817b1"]

    def test_19a1(self):
        record = load_fixture("19a1")
        assert record.label == "19a1"
        assert record.curve.ainvs == (0, 1, 1, -9, -15)
        assert record.source is RecordSource.FIXTURE
        cert = record.certificate
        assert cert.rank_one and cert.sha_p_trivial and cert.mu_zero
        assert cert.heegner_index_equals_tamagawa_p_part is None

    def test_817b1(self):
        record = load_fixture("817b1")
        assert record.curve.ainvs == (0, 1, 1, -16649, 821406)
        assert record.certificate.heegner_index_equals_tamagawa_p_part is True
        assert record.certificate.rank_one is None

    def test_unknown_fixture(self):
        with pytest.raises(FileNotFoundError):
            load_fixture("11a1")


class TestParse:
    def test_curve(self):
        record = parse_record(CURVE_TEXT % "19")
        assert isinstance(record, CurveRecord)
        assert record.certificate is None
        assert record.source is RecordSource.USER

    def test_conductor_mismatch_points_at_line(self):
        with pytest.raises(ValidationError) as info:
            parse_record(CURVE_TEXT % "38", path="bad.json")
        assert info.value.line == 3
        assert str(info.value).startswith("bad.json:3: conductor 38")

    def test_syntax_error_has_position(self):
        with pytest.raises(ParseError) as info:
            parse_record('{\n  "ainvs": [0, 1,\n}\n', path="broken.json")
        assert info.value.line == 3
        assert str(info.value).startswith("broken.json:3:")

    def test_not_an_object(self):
        with pytest.raises(ParseError):
            parse_record("[1, 2, 3]")

    def test_singular_curve(self):
        with pytest.raises(ValidationError) as info:
            parse_record('{"ainvs": [0, 0, 0, 0, 0]}')
        assert info.value.key == "ainvs"

    def test_booleans_are_not_integers(self):
        with pytest.raises(ValidationError):
            parse_record('{"ainvs": [0, 1, 1, true, -15]}')

    def test_big_integers_as_strings(self):
        record = parse_record('{"ainvs": ["0", "1", "1", "-16649", "821406"], "label": "817b1"}')
        assert record.curve.a6 == 821406

    def test_unknown_certificate_field(self):
        text = json.dumps({"ainvs": [0, 1, 1, -9, -15], "certificate": {"source": "s", "analytic_rank": 1}})
        with pytest.raises(ValidationError) as info:
            parse_record(text)
        assert "analytic_rank" in str(info.value)

    def test_certificate_field_type(self):
        text = json.dumps({"ainvs": [0, 1, 1, -9, -15], "certificate": {"source": "s", "rank_one": "yes"}})
        with pytest.raises(ValidationError):
            parse_record(text)

    def test_lambda_known_without_mu(self):
        text = json.dumps({"ainvs": [0, 1, 1, -9, -15], "certificate": {"source": "s", "lambda_known": 0}})
        with pytest.raises(ValidationError) as info:
            parse_record(text)
        assert info.value.key == "lambda_known"

    def test_eigenform(self):
        record = parse_record(EIGENFORM_TEXT)
        assert isinstance(record, EigenformRecord)
        assert record.a_coeffs == {2: 0, 3: -2, 5: 3}
        assert record.bad_prime_kinds == {19: ReductionKind.MULTIPLICATIVE}

    def test_eigenform_unknown_kind(self):
        with pytest.raises(ValidationError):
            parse_record(EIGENFORM_TEXT.replace("bad_multiplicative", "bad_weird"))

    def test_eigenform_hasse_violation_located(self):
        with pytest.raises(ValidationError) as info:
            parse_record(EIGENFORM_TEXT.replace('"5": "3"', '"5": "7"'), path="f.json")
        assert info.value.line == 2

    def test_neither_kind(self):
        with pytest.raises(ValidationError):
            parse_record('{"label": "x"}')

    def test_remote_needs_label(self):
        with pytest.raises(ValidationError):
            CurveRecord("", EllipticCurveQ(0, 1, 1, -9, -15), source=RecordSource.REMOTE)


class TestFiles:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError) as info:
            load_record(tmp_path / "nope.json")
        assert "no such file" in str(info.value)

    def test_save_and_load_curve(self, tmp_path):
        record = load_fixture("817b1")
        path = save_record(record, tmp_path / "sub" / "817b1.json")
        again = load_record(path)
        assert again.curve == record.curve
        assert again.certificate == record.certificate
        assert path.read_text(encoding="utf-8") == dump_record(again)

    def test_dump_is_stable(self):
        text = dump_record(parse_record(EIGENFORM_TEXT))
        assert text.endswith("}\n")
        assert json.loads(text)["a_coeffs"] == {"2": "0", "3": "-2", "5": "3"}
        assert '"conductor"' not in text

    def test_curve_dump_has_conductor(self):
        data = json.loads(dump_record(load_fixture("19a1")))
        assert data["conductor"] == "19"
        assert data["ainvs"] == ["0", "1", "1", "-9", "-15"]
