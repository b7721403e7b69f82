"""Elliptic-curve database client with an on-disk cache.

Network access is opt-out: set LAMTRANSFER_OFFLINE=1 (or pass --offline) and
only the cache is consulted.

Cache entries are JSON files holding the canonical record text and its sha256:

    {"checksum": "<hex>", "label": "19a1", "record": "<canonical record JSON>"}
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import time
import urllib.error
import urllib.parse
import urllib.request
from contextlib import contextmanager
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterator, Optional

from .forms import ValidationError
from .records import CurveRecord, RecordSource, dump_record, parse_record

logger = logging.getLogger(__name__)

DEFAULT_API_URL = "https://www.lmfdb.org/api/ec_curvedata/"
DEFAULT_CACHE_DIR = Path("~/.cache/lamtransfer")

_LABEL_RE = re.compile(r"^[0-9]+(\.[a-z]+[0-9]+|[a-z]+[0-9]+)$")


class NetworkError(RuntimeError):
    pass


class NotFound(LookupError):
    pass


class CacheCorrupt(RuntimeError):
    pass


@dataclass(frozen=True)
class RemoteConfig:
    api_url: str = DEFAULT_API_URL
    cache_dir: Path = DEFAULT_CACHE_DIR
    offline: bool = False
    timeout_seconds: int = 10
    retries: int = 3
    backoff_seconds: float = 0.5

    def with_overrides(self, *, offline: Optional[bool] = None, cache_dir: Optional[str] = None) -> "RemoteConfig":
        cfg = self
        if offline:
            cfg = replace(cfg, offline=True)
        if cache_dir:
            cfg = replace(cfg, cache_dir=Path(cache_dir))
        return cfg


def config_from_env() -> RemoteConfig:
    api_url = os.getenv("LAMTRANSFER_API_URL", "").strip() or DEFAULT_API_URL
    cache_dir = Path(os.getenv("LAMTRANSFER_CACHE_DIR", "").strip() or DEFAULT_CACHE_DIR)
    offline = os.getenv("LAMTRANSFER_OFFLINE", "0").strip().lower() in {"1", "true", "yes", "on"}

    timeout_seconds = 10
    raw_timeout = os.getenv("LAMTRANSFER_TIMEOUT")
    if raw_timeout:
        try:
            timeout_seconds = max(1, int(raw_timeout))
        except ValueError:
            timeout_seconds = 10

    return RemoteConfig(
        api_url=api_url,
        cache_dir=cache_dir,
        offline=offline,
        timeout_seconds=timeout_seconds,
    )


def _check_label(label: str) -> None:
    if not _LABEL_RE.match(label):
        raise NotFound(f"'{label}' is not an elliptic curve label (e.g. 19a1 or 19.a2)")


def _checksum(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _cache_path(label: str, config: RemoteConfig) -> Path:
    return config.cache_dir.expanduser() / f"{label}.json"


def read_cache(label: str, config: RemoteConfig) -> Optional[CurveRecord]:
    path = _cache_path(label, config)
    if not path.exists():
        return None
    try:
        entry = json.loads(path.read_text(encoding="utf-8"))
        text = entry["record"]
        checksum = entry["checksum"]
    except (ValueError, KeyError, TypeError) as exc:
        raise CacheCorrupt(f"unreadable cache entry {path}: {exc}") from None
    if _checksum(text) != checksum:
        raise CacheCorrupt(f"checksum mismatch in cache entry {path}")
    logger.debug("cache hit for %s", label)
    record = parse_record(text, path=str(path), source=RecordSource.REMOTE)
    if not isinstance(record, CurveRecord):
        raise CacheCorrupt(f"cache entry {path} is not a curve record")
    return record


@contextmanager
def _cache_lock(path: Path, attempts: int = 50, delay: float = 0.1) -> Iterator[None]:
    lock = path.with_suffix(".lock")
    for _ in range(attempts):
        try:
            fd = os.open(str(lock), os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            break
        except FileExistsError:
            time.sleep(delay)
    else:
        raise CacheCorrupt(f"cache lock {lock} held too long; remove it if no fetch is running")
    try:
        os.close(fd)
        yield
    finally:
        lock.unlink()


def write_cache(record: CurveRecord, config: RemoteConfig) -> Path:
    path = _cache_path(record.label, config)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = dump_record(record)
    entry = json.dumps({"checksum": _checksum(text), "label": record.label, "record": text}, sort_keys=True, indent=2)
    with _cache_lock(path):
        tmp = path.with_suffix(".tmp")
        tmp.write_text(entry + "\n", encoding="utf-8")
        os.replace(tmp, path)
    logger.debug("cached %s at %s", record.label, path)
    return path


def _query_url(label: str, config: RemoteConfig) -> str:
    field = "lmfdb_label" if "." in label else "Clabel"
    query = urllib.parse.urlencode(
        {field: label, "_format": "json", "_fields": "ainvs,conductor,Clabel,lmfdb_label"}
    )
    return f"{config.api_url}?{query}"


def _download(url: str, config: RemoteConfig, opener: Callable, sleep: Callable[[float], None]) -> str:
    req = urllib.request.Request(url, headers={"Accept": "application/json"}, method="GET")
    last_error: Optional[BaseException] = None
    for attempt in range(config.retries):
        try:
            with opener(req, timeout=config.timeout_seconds) as resp:
                return resp.read().decode("utf-8", errors="replace")
        except urllib.error.HTTPError as e:
            if e.code == 404:
                raise NotFound(f"{url} returned 404") from e
            last_error = e
        except (urllib.error.URLError, OSError) as e:
            last_error = e
        if attempt + 1 < config.retries:
            wait = config.backoff_seconds * 2 ** attempt
            logger.warning("request to %s failed (%s); retrying in %.1fs", url, last_error, wait)
            sleep(wait)
    raise NetworkError(f"request to {url} failed after {config.retries} attempts: {last_error}")


def fetch_remote(
    label: str,
    config: Optional[RemoteConfig] = None,
    *,
    opener: Callable = urllib.request.urlopen,
    sleep: Callable[[float], None] = time.sleep,
) -> CurveRecord:
    """Curve record for a database label, from the cache or the network."""
    cfg = config or config_from_env()
    _check_label(label)
    cached = read_cache(label, cfg)
    if cached is not None:
        return cached
    if cfg.offline:
        raise NotFound(f"{label} is not cached and network access is disabled")

    url = _query_url(label, cfg)
    body = _download(url, cfg, opener, sleep)
    try:
        rows = json.loads(body)["data"]
    except (ValueError, KeyError, TypeError) as e:
        raise NetworkError(f"response from {url} was not in the expected format") from e
    if not rows:
        raise NotFound(f"no curve with label {label}")
    row = rows[0]
    data = {"label": label, "ainvs": [str(a) for a in row.get("ainvs", [])]}
    if row.get("conductor") is not None:
        data["conductor"] = str(row["conductor"])
    # same validation as user files, conductor recomputed locally
    record = parse_record(json.dumps(data), path=url, source=RecordSource.REMOTE)
    if not isinstance(record, CurveRecord):
        raise ValidationError(f"{url} did not describe a curve")
    write_cache(record, cfg)
    return record
