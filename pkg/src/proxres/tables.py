"""Deterministic CSV tables and the run manifest.

Numbers are written with a fixed number of significant digits, '.' decimal
separator and '\n' line endings regardless of locale; non-finite ratios
serialize as empty fields. Files are written atomically (temp file + rename)
so a crashed run never leaves a half-written table.
"""

import math
import os
import tempfile
from dataclasses import dataclass, field


def format_number(value, precision_digits=12):
    """Locale-independent significant-digit formatting; '' for None/inf."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    v = float(value)
    if math.isinf(v) or math.isnan(v):
        return ""
    if v == 0.0:
        v = 0.0  # normalize -0.0
    return f"{v:.{precision_digits}g}"


@dataclass
class SweepResult:
    """An ordered table plus the manifest data needed to reproduce it."""

    schema_id: str
    column_names: list
    rows: list = field(default_factory=list)
    manifest: dict = field(default_factory=dict)

    def add_row(self, values):
        if len(values) != len(self.column_names):
            raise ValueError(
                f"row has {len(values)} fields, schema {self.schema_id} "
                f"expects {len(self.column_names)}"
            )
        self.rows.append(list(values))

    def to_csv(self, precision_digits=12):
        lines = [",".join(self.column_names)]
        for row in self.rows:
            lines.append(",".join(format_number(v, precision_digits) for v in row))
        return "\n".join(lines) + "\n"


def atomic_write_text(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, table, precision_digits=12):
    atomic_write_text(path, table.to_csv(precision_digits))


def write_manifest(path, version, command, config_ini, timestamp):
    """Manifest = comment header + embedded config; the file itself parses
    as a config, so a run can be reproduced from its manifest alone."""
    text = (
        f"# proxres run manifest\n"
        f"# version: {version}\n"
        f"# command: {command}\n"
        f"# timestamp: {timestamp}\n\n"
        f"{config_ini}"
    )
    atomic_write_text(path, text)
