"""Curve and eigenform record files.

Records are JSON objects written one key per line (sorted keys, indent 2).
Integers that can grow large (a-invariants, coefficients) are stored as
decimal strings so they never pass through floating point.

Curve record:

    {
      "ainvs": ["0", "1", "1", "-9", "-15"],
      "certificate": {"rank_one": true, ..., "source": "..."},
      "conductor": "19",
      "label": "19a1"
    }

Eigenform record:

    {
      "a_coeffs": {"2": "-1", "3": "0", ...},
      "bad_prime_kinds": {"11": "bad_multiplicative"},
      "label": "11a",
      "level": 11,
      "weight": 2
    }
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from .curves import EllipticCurveQ, SingularCurveError, conductor
from .forms import EigenformRecord, ReductionKind, ValidationError
from .iwasawa import HypothesisCertificate

DATA_DIR = Path(__file__).resolve().parent / "data"

_INT_RE = re.compile(r"^-?[0-9]+$")


class ParseError(ValueError):
    def __init__(self, message: str, *, path: str, line: int = 0, col: int = 0):
        self.path = path
        self.line = line
        self.col = col
        super().__init__(f"{path}:{line}:{col}: {message}")


class RecordSource(Enum):
    FIXTURE = "fixture"
    REMOTE = "remote"
    USER = "user"


@dataclass(frozen=True)
class CurveRecord:
    label: str
    curve: EllipticCurveQ
    certificate: Optional[HypothesisCertificate] = None
    source: RecordSource = RecordSource.USER

    def __post_init__(self):
        if self.source is RecordSource.REMOTE and not self.label:
            raise ValidationError("remote records need a label", key="label")

    @property
    def ainvs(self) -> Tuple[int, int, int, int, int]:
        return self.curve.ainvs


Record = Union[CurveRecord, EigenformRecord]


def _key_line(text: str, key: str) -> Optional[int]:
    pattern = re.compile(r'"' + re.escape(key) + r'"\s*:')
    for lineno, line in enumerate(text.splitlines(), start=1):
        if pattern.search(line):
            return lineno
    return None


def _as_int(value: Any, what: str, key: str) -> int:
    if isinstance(value, bool):
        raise ValidationError(f"{what} must be an integer, got {value!r}", key=key)
    if isinstance(value, int):
        return value
    if isinstance(value, str) and _INT_RE.match(value.strip()):
        return int(value.strip())
    raise ValidationError(f"{what} must be an integer or decimal string, got {value!r}", key=key)


def _parse_certificate(raw: Any) -> HypothesisCertificate:
    if not isinstance(raw, dict):
        raise ValidationError("certificate must be an object", key="certificate")
    known = set(HypothesisCertificate.fact_names()) | {"source", "lambda_known"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValidationError(f"unknown certificate fields: {', '.join(unknown)}", key=unknown[0])
    if "source" not in raw:
        raise ValidationError("certificate needs a source", key="certificate")
    kwargs: Dict[str, Any] = {"source": str(raw["source"])}
    for name in HypothesisCertificate.fact_names():
        if name in raw:
            if not isinstance(raw[name], bool):
                raise ValidationError(f"certificate field {name} must be true or false", key=name)
            kwargs[name] = raw[name]
    if "lambda_known" in raw:
        kwargs["lambda_known"] = _as_int(raw["lambda_known"], "lambda_known", "lambda_known")
    return HypothesisCertificate(**kwargs)


def _curve_from_dict(data: Dict[str, Any], source: RecordSource) -> CurveRecord:
    ainvs = data["ainvs"]
    if not isinstance(ainvs, list) or len(ainvs) != 5:
        raise ValidationError("ainvs must be a list of 5 integers", key="ainvs")
    values = [_as_int(a, "a-invariant", "ainvs") for a in ainvs]
    label = data.get("label") or ""
    if not isinstance(label, str):
        raise ValidationError("label must be a string", key="label")
    try:
        curve = EllipticCurveQ(*values, label=label or None)
    except SingularCurveError as exc:
        raise ValidationError(str(exc), key="ainvs") from None
    if "conductor" in data:
        claimed = _as_int(data["conductor"], "conductor", "conductor")
        actual = conductor(curve).value
        if claimed != actual:
            raise ValidationError(f"conductor {claimed} does not match the computed {actual}", key="conductor")
    certificate = _parse_certificate(data["certificate"]) if data.get("certificate") is not None else None
    return CurveRecord(label, curve, certificate, source)


def _eigenform_from_dict(data: Dict[str, Any]) -> EigenformRecord:
    for key in ("level", "weight", "a_coeffs"):
        if key not in data:
            raise ValidationError(f"eigenform record lacks '{key}'")
    raw_coeffs = data["a_coeffs"]
    raw_kinds = data.get("bad_prime_kinds", {})
    if not isinstance(raw_coeffs, dict) or not isinstance(raw_kinds, dict):
        raise ValidationError("a_coeffs and bad_prime_kinds must be objects", key="a_coeffs")
    coeffs = {
        _as_int(ell, "prime index", "a_coeffs"): _as_int(a, "coefficient", "a_coeffs")
        for ell, a in raw_coeffs.items()
    }
    kinds = {}
    for ell, kind in raw_kinds.items():
        try:
            kinds[_as_int(ell, "prime", "bad_prime_kinds")] = ReductionKind(kind)
        except ValueError:
            raise ValidationError(f"unknown reduction kind {kind!r}", key="bad_prime_kinds") from None
    return EigenformRecord(
        level=_as_int(data["level"], "level", "level"),
        weight=_as_int(data["weight"], "weight", "weight"),
        a_coeffs=coeffs,
        bad_prime_kinds=kinds,
        label=data.get("label"),
    )


def parse_record(text: str, *, path: str = "<string>", source: RecordSource = RecordSource.USER) -> Record:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path=path, line=exc.lineno, col=exc.colno) from None
    if not isinstance(data, dict):
        raise ParseError("record must be a JSON object", path=path, line=1, col=1)
    try:
        if "ainvs" in data:
            return _curve_from_dict(data, source)
        if "level" in data or "a_coeffs" in data:
            return _eigenform_from_dict(data)
        raise ValidationError("record has neither 'ainvs' nor 'level'")
    except ValidationError as exc:
        line = _key_line(text, exc.key) if exc.key else None
        raise exc.located(path, line) from None


def load_record(path: Union[str, Path], source: RecordSource = RecordSource.USER) -> Record:
    path = Path(path).expanduser()
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ParseError("no such file", path=str(path)) from None
    return parse_record(text, path=str(path), source=source)


def record_to_dict(record: Record) -> Dict[str, Any]:
    if isinstance(record, CurveRecord):
        data: Dict[str, Any] = {
            "label": record.label,
            "ainvs": [str(a) for a in record.ainvs],
            "conductor": str(conductor(record.curve).value),
        }
        if record.certificate is not None:
            data["certificate"] = record.certificate.to_dict()
        return data
    data = {
        "level": record.level,
        "weight": record.weight,
        "a_coeffs": {str(ell): str(a) for ell, a in sorted(record.a_coeffs.items())},
        "bad_prime_kinds": {str(ell): k.value for ell, k in sorted(record.bad_prime_kinds.items())},
    }
    if record.label:
        data["label"] = record.label
    return data


def dump_record(record: Record) -> str:
    return json.dumps(record_to_dict(record), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def save_record(record: Record, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_record(record), encoding="utf-8")
    return path


def fixture_labels() -> List[str]:
    return sorted(p.stem for p in DATA_DIR.glob("*.json"))


def load_fixture(label: str) -> CurveRecord:
    path = DATA_DIR / f"{label}.json"
    if label not in fixture_labels():
        raise FileNotFoundError(f"no bundled fixture '{label}' (have: {', '.join(fixture_labels())})")
    record = load_record(path, source=RecordSource.FIXTURE)
    if not isinstance(record, CurveRecord):
        raise ValidationError(f"fixture {label} is not a curve record", path=str(path))
    return record
