from __future__ import annotations

import os
import tempfile
from pathlib import Path

LOG_DIRNAME = "PixelLogs"


def log_dir(output_dir: str | Path) -> Path:
    return Path(output_dir) / LOG_DIRNAME


def write_atomic(path: Path, data: bytes) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def write_session(output_dir: str | Path, filename: str, data: bytes) -> Path:
    """Write ``<output_dir>/PixelLogs/<filename>.json`` (replacing any stale copy)."""
    return write_atomic(log_dir(output_dir) / f"{filename}.json", data)
