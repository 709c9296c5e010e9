"""CSV emission. Floats use 17 significant digits, so values round-trip exactly."""

from __future__ import annotations

import csv
import os
import tempfile
from pathlib import Path

from .experiments import ErrorRow
from .stepper import EnergyRecord

ENERGY_HEADER = ["step", "time", "H", "kinetic", "fractional", "sav", "dissipation_rhs", "H_drop"]
TIME_HEADER = ["tau", "e_u_inf", "rate_u", "e_v_inf", "rate_v", "e_r", "rate_r"]
SPACE_HEADER = ["N", "e_u_seminorm", "rate_semi", "e_u_l2", "rate_u", "e_v_l2", "rate_v"]


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def write_csv(path: str | Path, header: list[str], rows) -> Path:
    """Write atomically: a temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(v) for v in row])
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
    return path


def energy_rows(ledger: list[EnergyRecord]):
    prev = None
    for rec in ledger:
        drop = 0.0 if prev is None else prev.H - rec.H
        yield [rec.n, rec.t, rec.H, rec.kinetic, rec.fractional, rec.sav, rec.dissipation_rhs, drop]
        prev = rec


def write_energy(path, ledger: list[EnergyRecord]) -> Path:
    return write_csv(path, ENERGY_HEADER, energy_rows(ledger))


def write_errors_time(path, rows: list[ErrorRow]) -> Path:
    return write_csv(
        path,
        TIME_HEADER,
        (
            [r.param, r.e_u_inf, r.rates.get("e_u_inf"), r.e_v_inf, r.rates.get("e_v_inf"), r.e_r, r.rates.get("e_r")]
            for r in rows
        ),
    )


def write_errors_space(path, rows: list[ErrorRow]) -> Path:
    return write_csv(
        path,
        SPACE_HEADER,
        (
            [
                int(r.param),
                r.e_u_seminorm,
                r.rates.get("e_u_seminorm"),
                r.e_u_l2,
                r.rates.get("e_u_l2"),
                r.e_v_l2,
                r.rates.get("e_v_l2"),
            ]
            for r in rows
        ),
    )


def energy_filename(gamma1: float, gamma2: float) -> str:
    return f"energy_g1_{gamma1:g}_g2_{gamma2:g}.csv"
