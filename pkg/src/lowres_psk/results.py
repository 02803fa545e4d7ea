"""SEP curves and their CSV/JSON persistence.

A curve file is a CSV with the header ``M,n,m,snr_db,value,uncertainty,method,seed``
plus a ``.json`` sidecar holding the run configuration, seed, backend and
timestamp.  The JSON format stores the same rows together with that
metadata in one document.  Floats are written with ``repr`` so a reload
reproduces the curve exactly.
"""

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

from .errors import ConfigError

CSV_HEADER = ("M", "n", "m", "snr_db", "value", "uncertainty", "method", "seed")


@dataclass(frozen=True)
class ResultRow:
    M: int
    n: int
    m: float
    snr_db: float
    value: float
    uncertainty: float
    method: str
    seed: Optional[int] = None
    timestamp: Optional[str] = None

    def csv_fields(self):
        seed = "" if self.seed is None else str(self.seed)
        return [str(self.M), str(self.n) if isinstance(self.n, int) else repr(float(self.n)), repr(float(self.m)), repr(float(self.snr_db)),
                repr(float(self.value)), repr(float(self.uncertainty)), self.method, seed]


@dataclass(frozen=True)
class SepCurve:
    """Average SEP samples for one ``(M, n, m)`` ordered by SNR.

    ``uncertainty`` is a standard error for Monte Carlo rows and a
    quadrature error estimate for analytic rows; ``trials`` is empty for
    analytic curves.
    """

    M: int
    n: int
    m: float
    snr_db: Tuple[float, ...]
    values: Tuple[float, ...]
    uncertainties: Tuple[float, ...]
    method: str
    seed: Optional[int] = None
    trials: Tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for name in ("snr_db", "values", "uncertainties", "trials"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        size = len(self.snr_db)
        if len(self.values) != size or len(self.uncertainties) != size:
            raise ConfigError("curve columns must have equal length")
        if self.trials and len(self.trials) != size:
            raise ConfigError("trials must be empty or match the SNR grid")
        if any(b < a for a, b in zip(self.snr_db, self.snr_db[1:])):
            raise ConfigError("curve SNR grid must be nondecreasing")

    def __len__(self):
        return len(self.snr_db)

    def rows(self, timestamp: Optional[str] = None):
        return [ResultRow(self.M, self.n, self.m, s, v, u, self.method, self.seed, timestamp)
                for s, v, u in zip(self.snr_db, self.values, self.uncertainties)]

    def __iter__(self):
        return iter(zip(self.snr_db, self.values))


def curve_to_csv(curve: SepCurve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in curve.rows():
        writer.writerow(row.csv_fields())
    return buf.getvalue()


def curve_to_dict(curve: SepCurve) -> dict:
    return {
        "M": curve.M, "n": curve.n, "m": curve.m, "method": curve.method, "seed": curve.seed,
        "snr_db": list(curve.snr_db), "values": list(curve.values),
        "uncertainties": list(curve.uncertainties), "trials": list(curve.trials),
    }


def curve_from_dict(d: dict) -> SepCurve:
    return SepCurve(int(d["M"]), _parse_n(str(d["n"])), float(d["m"]), d["snr_db"], d["values"],
                    d["uncertainties"], d["method"], d.get("seed"), d.get("trials", ()))


def _parse_n(text):
    # asymptotic curves use n = inf for the unquantized receiver
    return int(text) if text.lstrip("-").isdigit() else float(text)


def curve_from_csv(text: str, trials=()) -> SepCurve:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != CSV_HEADER:
        raise ConfigError(f"unexpected CSV header {header!r}")
    rows = [r for r in reader if r]
    if not rows:
        raise ConfigError("curve file has no data rows")
    keys = {(r[0], r[1], r[2], r[6], r[7]) for r in rows}
    if len(keys) != 1:
        raise ConfigError("a curve file must hold a single (M, n, m, method, seed)")
    M, n, m, method, seed = rows[0][0], rows[0][1], rows[0][2], rows[0][6], rows[0][7]
    return SepCurve(int(M), _parse_n(n), float(m),
                    [float(r[3]) for r in rows],
                    [float(r[4]) for r in rows],
                    [float(r[5]) for r in rows],
                    method, int(seed) if seed else None, trials)


def write_curve(curve: SepCurve, path, fmt: str = "csv", metadata: Optional[dict] = None,
                overwrite: bool = False) -> Path:
    """Write ``curve`` to ``path``; CSV output also gets a JSON sidecar.

    Refuses to replace an existing file unless ``overwrite`` is set.
    """
    path = Path(path)
    sidecar = path.with_suffix(path.suffix + ".json") if fmt == "csv" else None
    for target in (path, sidecar):
        if target is not None and target.exists() and not overwrite:
            raise FileExistsError(f"{target} exists; pass overwrite to replace it")
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = dict(metadata or {})
    if fmt == "csv":
        path.write_text(curve_to_csv(curve))
        meta["trials"] = list(curve.trials)
        sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True, default=_json_default) + "\n")
    elif fmt == "json":
        doc = {"metadata": meta, "curve": curve_to_dict(curve)}
        path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n")
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    return path


def load_curve(path) -> SepCurve:
    """Reload a curve written by :func:`write_curve` (format taken from the suffix)."""
    path = Path(path)
    if path.suffix == ".json":
        doc = json.loads(path.read_text())
        return curve_from_dict(doc["curve"])
    trials = ()
    sidecar = path.with_suffix(path.suffix + ".json")
    if sidecar.exists():
        trials = json.loads(sidecar.read_text()).get("trials", ())
    return curve_from_csv(path.read_text(), trials)


def load_metadata(path) -> dict:
    path = Path(path)
    if path.suffix == ".json":
        return json.loads(path.read_text())["metadata"]
    return json.loads(path.with_suffix(path.suffix + ".json").read_text())


def _json_default(obj):
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, (tuple, set)):
        return list(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_table(header, rows, path, fmt: str = "csv", metadata: Optional[dict] = None,
                overwrite: bool = False) -> Path:
    """Write a generic result table (same CSV + sidecar / JSON layout as curves)."""
    path = Path(path)
    sidecar = path.with_suffix(path.suffix + ".json") if fmt == "csv" else None
    for target in (path, sidecar):
        if target is not None and target.exists() and not overwrite:
            raise FileExistsError(f"{target} exists; pass overwrite to replace it")
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = dict(metadata or {})
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
        path.write_text(buf.getvalue())
        sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True, default=_json_default) + "\n")
    elif fmt == "json":
        doc = {"metadata": meta, "header": list(header), "rows": [list(r) for r in rows]}
        path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n")
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    return path
