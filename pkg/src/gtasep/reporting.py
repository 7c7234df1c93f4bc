"""Config parsing and dataset writers shared by the command-line tools.

Run configs are plain ``key=value`` lines (``#`` comments allowed); values
are coerced to int, Fraction (``a/b``), float, or comma-separated lists
thereof.  Every emitted CSV gets a documented header row, and every run
directory gets a JSON metadata file echoing the full configuration, the
seed, the package version and a timestamp, so a run is reproducible from
its artifacts alone.  Exact rationals are serialized as
"numerator/denominator" strings to avoid precision loss.
"""

from __future__ import annotations

import csv
import json
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence


def coerce_value(text: str):
    """int | Fraction | float | list | str, by syntactic shape."""
    text = text.strip()
    if "," in text:
        return [coerce_value(part) for part in text.split(",") if part.strip()]
    try:
        return int(text)
    except ValueError:
        pass
    if "/" in text:
        num, _, den = text.partition("/")
        try:
            return Fraction(int(num), int(den))
        except ValueError:
            pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_config(path: str | Path) -> dict[str, Any]:
    """Read a key=value config file."""
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = coerce_value(value)
    return out


def apply_overrides(config: dict[str, Any], overrides: Iterable[str]) -> dict[str, Any]:
    """Apply repeated ``--set key=value`` flags on top of a config."""
    out = dict(config)
    for item in overrides:
        if "=" not in item:
            raise ValueError(f"override must be key=value, got {item!r}")
        key, _, value = item.partition("=")
        out[key.strip()] = coerce_value(value)
    return out


def frac_str(x) -> str:
    """Serialize exact rationals losslessly; floats via repr."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(list(row))
    return path


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return frac_str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if hasattr(obj, "item"):
        return obj.item()
    return obj


def write_metadata(path: str | Path, command: str, config: dict, seed: int | None,
                   outputs: Sequence[str]) -> Path:
    """JSON sidecar with the full parameter echo for reproducibility."""
    from . import __version__

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "command": command,
        "config": _jsonable(config),
        "seed": seed,
        "version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "outputs": list(outputs),
    }
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def write_json(path: str | Path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(payload), indent=2) + "\n")
    return path
