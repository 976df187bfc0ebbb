"""
Report envelopes and JSON / CSV writers.

An envelope echoes everything needed to re-run a report; timestamps and
wall time live in the envelope so the payload stays byte-identical across
runs with the same flags.
"""

import csv
import json
import logging
import shlex
import sys
from datetime import datetime
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from src import __version__

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _default(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def command_line(command: str, parameters: Dict, positional: Sequence[str] = ()) -> str:
    """Shell line that regenerates a report from its parameter echo.

    Keys named in `positional` are emitted bare, after the options. Values
    starting with '-' use the --flag=value form so argparse does not read
    them as options.
    """
    parts = ["python", "capwaves.py", command]
    tail = []
    for key, value in parameters.items():
        if value is None or value is False:
            continue
        if key in positional:
            tail.extend(str(v) for v in (value if isinstance(value, (list, tuple)) else [value]))
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            parts.append(flag)
        elif isinstance(value, (list, tuple)):
            parts.append(flag)
            parts.extend(str(v) for v in value)
        elif str(value).startswith("-"):
            parts.append(f"{flag}={value}")
        else:
            parts.extend([flag, str(value)])
    if any(v.startswith("-") for v in tail):
        parts.append("--")
    parts.extend(tail)
    return " ".join(shlex.quote(p) for p in parts)


def build_envelope(command: str, parameters: Dict, payload, started_at: datetime, wall_time: float,
                   positional: Sequence[str] = ()) -> Dict:
    return {
        'command': command,
        'parameters': parameters,
        'command_line': command_line(command, parameters, positional),
        'version': __version__,
        'started_at': started_at.isoformat(),
        'wall_time_seconds': wall_time,
        'payload': payload,
    }


def dumps(envelope: Dict, indent: Optional[int] = 2) -> str:
    return json.dumps(envelope, indent=indent, sort_keys=True, ensure_ascii=False, default=_default)


def write_json(envelope: Dict, output: Optional[PathLike] = None, indent: Optional[int] = 2):
    text = dumps(envelope, indent)
    if output is None:
        sys.stdout.write(text + "\n")
        return
    with open(output, 'w', encoding='utf-8') as f:
        f.write(text + "\n")
    logger.info(f"Report written to {output}")


def write_csv(rows: Iterable[Sequence], output: Optional[PathLike] = None) -> int:
    """Stream rows (first row is the header); returns the number of data rows."""
    handle = sys.stdout if output is None else open(output, 'w', encoding='utf-8', newline='')
    count = -1
    try:
        writer = csv.writer(handle)
        for row in rows:
            writer.writerow(row)
            count += 1
    finally:
        if output is not None:
            handle.close()
            logger.info(f"CSV written to {output}")
    return max(count, 0)


def dict_rows(records: List[Dict], columns: Sequence[str]) -> List[List]:
    """Header plus one row per record, in column order."""
    return [list(columns)] + [[record[c] for c in columns] for record in records]


def read_envelope(path: PathLike) -> Dict:
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)
