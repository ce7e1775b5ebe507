"""Utility functions for serialization and run bookkeeping"""
import json
import os
from datetime import datetime, timezone
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import psutil

from config import CSV_DIGITS, SIDECAR_SUFFIX


def sign(value: float) -> int:
    return (value > 0) - (value < 0)


def ensure_parent_dir(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]):
    """Numeric CSV: header row, comma separated, Unix newlines, 17 significant digits, booleans as 0/1"""
    ensure_parent_dir(path)
    data = np.array([[float(v) for v in row] for row in rows], dtype=float).reshape(-1, len(header))
    np.savetxt(
        path,
        data,
        fmt=f"%.{CSV_DIGITS}g",
        delimiter=",",
        header=",".join(header),
        comments="",
        newline="\n",
        encoding="utf-8",
    )


def read_csv(path: str) -> Dict[str, List[float]]:
    """Parse a file written by write_csv back into columns"""
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, encoding="utf-8")
    if data.size == 0:
        return {name: [] for name in header}
    return {name: data[:, i].tolist() for i, name in enumerate(header)}


def write_json(path: str, data: Dict):
    ensure_parent_dir(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, indent=2, allow_nan=True)
        f.write("\n")


def memory_mb() -> float:
    """Resident memory of this process in MB"""
    return psutil.Process(os.getpid()).memory_info().rss / 1024 / 1024


def write_report(path: str, fmt: str, report: Dict):
    """A flat report as JSON, or as a one-row CSV of its scalar fields"""
    if fmt == "json":
        write_json(path, report)
        return

    fields = [k for k, v in report.items() if isinstance(v, (int, float))]
    write_csv(path, fields, [[report[k] for k in fields]])


def write_sidecar(path: str, command: str, arguments: Dict, started: float, finished: float,
                  extra: Optional[Dict] = None) -> str:
    """Run metadata next to a data file; data files themselves stay timestamp-free"""
    sidecar = path + SIDECAR_SUFFIX
    meta = {
        "command": command,
        "arguments": arguments,
        "data_file": os.path.basename(path),
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
        "wall_time_s": finished - started,
        "memory_mb": memory_mb(),
    }
    if extra:
        meta.update(extra)
    write_json(sidecar, meta)
    return sidecar
