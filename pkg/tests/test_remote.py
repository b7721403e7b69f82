"""Tests for the curve database client (network replaced by fake openers)."""

import io
import json
import os
import urllib.error
from pathlib import Path

import pytest

from lamtransfer.forms import ValidationError
from lamtransfer.records import RecordSource
from lamtransfer.remote import (
    CacheCorrupt,
    NetworkError,
    NotFound,
    RemoteConfig,
    config_from_env,
    fetch_remote,
    read_cache,
)

ROW_19A1 = {"ainvs": [0, 1, 1, -9, -15], "conductor": 19, "Clabel": "19a1", "lmfdb_label": "19.a2"}


def body(*rows):
    return json.dumps({"data": list(rows)}).encode("utf-8")


class FakeOpener:
    """Replays a list of responses; exceptions in the list are raised."""

    def __init__(self, *responses):
        self.responses = list(responses)
        self.requests = []

    def __call__(self, req, timeout=None):
        self.requests.append(req.full_url)
        response = self.responses.pop(0)
        if isinstance(response, BaseException):
            raise response
        return io.BytesIO(response)


def refuse(req, timeout=None):
    raise AssertionError("network used")


def http_error(code):
    return urllib.error.HTTPError("https://example.org", code, "error", hdrs=None, fp=None)


class TestFetch:
    def setup_method(self):
        self.sleeps = []

    def config(self, tmp_path, **kwargs):
        return RemoteConfig(api_url="https://example.org/api/", cache_dir=tmp_path, **kwargs)

    def test_fetch_and_cache(self, tmp_path):
        opener = FakeOpener(body(ROW_19A1))
        record = fetch_remote("19a1", self.config(tmp_path), opener=opener, sleep=self.sleeps.append)
        assert record.curve.ainvs == (0, 1, 1, -9, -15)
        assert record.source is RecordSource.REMOTE
        assert "Clabel=19a1" in opener.requests[0]
        assert (tmp_path / "19a1.json").exists()
        assert not (tmp_path / "19a1.lock").exists()

        again = fetch_remote("19a1", self.config(tmp_path, offline=True), opener=refuse)
        assert again.curve == record.curve

    def test_dotted_label_query(self, tmp_path):
        opener = FakeOpener(body(ROW_19A1))
        fetch_remote("19.a2", self.config(tmp_path), opener=opener, sleep=self.sleeps.append)
        assert "lmfdb_label=19.a2" in opener.requests[0]

    def test_offline_without_cache(self, tmp_path):
        with pytest.raises(NotFound):
            fetch_remote("19a1", self.config(tmp_path, offline=True), opener=refuse)

    def test_bad_label(self, tmp_path):
        with pytest.raises(NotFound):
            fetch_remote("../etc/passwd", self.config(tmp_path), opener=refuse)

    def test_404(self, tmp_path):
        opener = FakeOpener(http_error(404))
        with pytest.raises(NotFound):
            fetch_remote("19a1", self.config(tmp_path), opener=opener, sleep=self.sleeps.append)
        assert self.sleeps == []

    def test_empty_result(self, tmp_path):
        with pytest.raises(NotFound):
            fetch_remote("19z9", self.config(tmp_path), opener=FakeOpener(body()), sleep=self.sleeps.append)

    def test_retries_with_backoff(self, tmp_path):
        opener = FakeOpener(http_error(503), urllib.error.URLError("timed out"), body(ROW_19A1))
        record = fetch_remote("19a1", self.config(tmp_path), opener=opener, sleep=self.sleeps.append)
        assert record.label == "19a1"
        assert self.sleeps == [0.5, 1.0]

    def test_gives_up(self, tmp_path):
        opener = FakeOpener(http_error(500), http_error(500), http_error(500))
        with pytest.raises(NetworkError):
            fetch_remote("19a1", self.config(tmp_path), opener=opener, sleep=self.sleeps.append)
        assert len(opener.requests) == 3
        assert self.sleeps == [0.5, 1.0]

    def test_malformed_body(self, tmp_path):
        with pytest.raises(NetworkError):
            fetch_remote("19a1", self.config(tmp_path), opener=FakeOpener(b"<html>"), sleep=self.sleeps.append)

    def test_server_conductor_is_checked(self, tmp_path):
        row = dict(ROW_19A1, conductor=38)
        with pytest.raises(ValidationError):
            fetch_remote("19a1", self.config(tmp_path), opener=FakeOpener(body(row)), sleep=self.sleeps.append)
        assert not (tmp_path / "19a1.json").exists()


class TestCache:
    def test_checksum_mismatch(self, tmp_path):
        config = RemoteConfig(cache_dir=tmp_path)
        fetch_remote("19a1", config, opener=FakeOpener(body(ROW_19A1)), sleep=lambda s: None)
        path = tmp_path / "19a1.json"
        entry = json.loads(path.read_text(encoding="utf-8"))
        entry["record"] = entry["record"].replace('"-15"', '"-16"')
        path.write_text(json.dumps(entry), encoding="utf-8")
        with pytest.raises(CacheCorrupt):
            read_cache("19a1", config)

    def test_unreadable_entry(self, tmp_path):
        (tmp_path / "19a1.json").write_text("not json", encoding="utf-8")
        with pytest.raises(CacheCorrupt):
            read_cache("19a1", RemoteConfig(cache_dir=tmp_path))

    def test_missing_entry(self, tmp_path):
        assert read_cache("19a1", RemoteConfig(cache_dir=tmp_path)) is None


class TestConfig:
    def test_defaults(self, monkeypatch):
        for name in ("LAMTRANSFER_API_URL", "LAMTRANSFER_CACHE_DIR", "LAMTRANSFER_OFFLINE", "LAMTRANSFER_TIMEOUT"):
            monkeypatch.delenv(name, raising=False)
        config = config_from_env()
        assert config.api_url == "https://www.lmfdb.org/api/ec_curvedata/"
        assert config.offline is False
        assert config.timeout_seconds == 10

    def test_environment(self, monkeypatch, tmp_path):
        monkeypatch.setenv("LAMTRANSFER_CACHE_DIR", str(tmp_path))
        monkeypatch.setenv("LAMTRANSFER_OFFLINE", "yes")
        monkeypatch.setenv("LAMTRANSFER_TIMEOUT", "abc")
        config = config_from_env()
        assert config.cache_dir == Path(tmp_path)
        assert config.offline is True
        assert config.timeout_seconds == 10

    def test_overrides(self, tmp_path):
        config = RemoteConfig().with_overrides(offline=True, cache_dir=str(tmp_path))
        assert config.offline
        assert config.cache_dir == tmp_path
        assert RemoteConfig().with_overrides(offline=False).offline is False


@pytest.mark.skipif(os.getenv("LAMTRANSFER_ONLINE_TESTS") != "1", reason="set LAMTRANSFER_ONLINE_TESTS=1")
def test_live_database(tmp_path):
    record = fetch_remote("11a1", RemoteConfig(cache_dir=tmp_path))
    assert record.curve.ainvs == (0, -1, 1, -10, -20)
