"""Benchmark dataset fetching: download over HTTP(S), verify a pinned
SHA-256, convert to the canonical dataset CSV layout (header row, numeric
columns, target last).

Sources and checksums live in ``datasets.cfg`` next to this package so
they can be repointed without code changes. Entries whose checksum is
``unpinned`` are accepted on first fetch with a warning that logs the
computed digest (for later pinning). Raw downloads are cached under
$REBOOST_CACHE_DIR (default ~/.cache/reboost); a warm cache needs no
network.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import logging
import os
import urllib.error
import urllib.request
from importlib import resources
from pathlib import Path

log = logging.getLogger(__name__)

CACHE_ENV = "REBOOST_CACHE_DIR"


class NetworkError(RuntimeError):
    pass


class ChecksumError(RuntimeError):
    pass


def cache_dir() -> Path:
    root = os.environ.get(CACHE_ENV)
    if root:
        return Path(root)
    return Path.home() / ".cache" / "reboost"


def load_source_table(path=None) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    if path is not None:
        parser.read(path, encoding="utf-8")
    else:
        text = resources.files("reboost").joinpath("datasets.cfg").read_text("utf-8")
        parser.read_string(text)
    return parser


def _download(url: str, dest: Path) -> None:
    dest.parent.mkdir(parents=True, exist_ok=True)
    try:
        with urllib.request.urlopen(url, timeout=60) as response:
            payload = response.read()
    except (urllib.error.URLError, OSError, ValueError) as err:
        raise NetworkError(f"download failed for {url}: {err}") from err
    dest.write_bytes(payload)


def _verify(path: Path, pinned: str, name: str) -> None:
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    if pinned.lower() == "unpinned":
        log.warning("dataset %s has no pinned checksum; computed sha256=%s", name, digest)
        return
    if digest != pinned.lower():
        path.unlink(missing_ok=True)
        raise ChecksumError(
            f"{name}: sha256 mismatch (expected {pinned}, got {digest}); file removed"
        )


def fetch_dataset(name: str, out_dir, url_override: str | None = None,
                  table_path=None) -> Path:
    """Obtain one named dataset and write ``<out_dir>/<name>.csv``.

    Raises NetworkError / ChecksumError; KeyError for unknown names.
    """
    table = load_source_table(table_path)
    if name not in table:
        raise KeyError(f"unknown dataset {name!r}; known: {table.sections()}")
    entry = table[name]
    url = url_override or entry["url"]
    raw = cache_dir() / "raw" / f"{name}.data"

    if not raw.exists():
        _download(url, raw)
    _verify(raw, entry.get("sha256", "unpinned"), name)

    converter = _CONVERTERS[entry["format"]]
    rows, header = converter(raw.read_text("utf-8", errors="replace"))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{name}.csv"
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return out_path


def _split_rows(text: str, delim: str | None):
    for line in text.splitlines():
        line = line.strip()
        if line:
            yield line.split(delim) if delim else line.split(",")


def _generic_header(n_features: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n_features)] + ["target"]


def _convert_csv_passthrough(text: str):
    """Already header + numeric columns with the target last."""
    rows = list(csv.reader(text.splitlines()))
    header = rows[0]
    data = [row for row in rows[1:] if row]
    return data, header


def _convert_whitespace_header(text: str):
    """Whitespace-separated with a header line; target already last."""
    rows = list(_split_rows(text, None))
    return rows[1:], rows[0]


def _convert_prostate(text: str):
    """Stanford prostate file: drop the row-index and train/test columns,
    keep the eight clinical predictors with log-PSA as the target."""
    rows = list(_split_rows(text, None))
    header = rows[0]  # lcavol ... lpsa train (index column is unnamed)
    out = [row[1:-1] for row in rows[1:]]
    return out, header[:-1]


def _convert_abalone(text: str):
    """Sex M/F/I encoded as +1/-1/0 in a single column; rings is the target."""
    code = {"M": "1", "F": "-1", "I": "0"}
    out = []
    for row in _split_rows(text, ","):
        out.append([code[row[0]]] + row[1:])
    return out, ["sex"] + _generic_header(7)


def _convert_spam(text: str):
    """57 numeric features; {0,1} spam flag remapped to -1/+1."""
    out = []
    for row in _split_rows(text, ","):
        out.append(row[:-1] + ["1" if row[-1] == "1" else "-1"])
    return out, _generic_header(57)


def _convert_ionosphere(text: str):
    """34 numeric features; 'g'/'b' class mapped to +1/-1."""
    out = []
    for row in _split_rows(text, ","):
        out.append(row[:-1] + ["1" if row[-1] == "g" else "-1"])
    return out, _generic_header(34)


def _convert_wdbc(text: str):
    """Drop the patient id; diagnosis M/B mapped to +1/-1, moved last."""
    out = []
    for row in _split_rows(text, ","):
        label = "1" if row[1] == "M" else "-1"
        out.append(row[2:] + [label])
    return out, _generic_header(30)


_CONVERTERS = {
    "csv-target-last": _convert_csv_passthrough,
    "whitespace-target-last": _convert_whitespace_header,
    "prostate": _convert_prostate,
    "abalone": _convert_abalone,
    "spam": _convert_spam,
    "ionosphere": _convert_ionosphere,
    "wdbc": _convert_wdbc,
}
