# coding=utf-8
"""
Flat-file emission for analyses: JSON reports, region CSVs, margin tables and
a companion gnuplot script for sweeps.
"""
import csv
import io
import json
import os

from .dynamics import Verdict
from .log_utils import get_default_logger

log = get_default_logger(__name__)

ERROR_CODE = -1
SIM_CODES = {Verdict.STABLE: 1, Verdict.OSCILLATING: 0, Verdict.DIVERGED: 3}
REGION_KINDS = ("small_signal", "large_signal", "sim")


def to_json(data, indent=2):
    """Serialize a report object (anything with ``to_dict``) or a plain dict."""
    if hasattr(data, "to_dict"):
        data = data.to_dict()
    return json.dumps(data, indent=indent)


def _number(value):
    return "{:.15g}".format(value)


def cell_code(cell, kind):
    """
    Region CSV code of one cell: 0 Unstable, 1 Stable, 2 NoEquilibrium for the
    criteria; 1 Stable, 0 Oscillating, 3 Diverged for simulations; -1 for a
    failed cell and empty when the cell was not evaluated for ``kind``.
    """
    verdict = getattr(cell, kind)
    if verdict is None:
        return str(ERROR_CODE) if cell.errors else ""
    if kind == "sim":
        return str(SIM_CODES[verdict])
    return str(verdict.value)


def region_kinds(region):
    return [kind for kind in REGION_KINDS if any(getattr(cell, kind) is not None for cell in region)]


def region_csv(region, kind):
    """
    Matrix layout readable as a gnuplot nonuniform matrix: the header row is
    the column count followed by the axis1 values, every further row starts
    with its axis2 value.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([str(region.axis1.n)] + [_number(x) for x in region.axis1.values])
    for j, y in enumerate(region.axis2.values):
        writer.writerow([_number(y)] + [cell_code(region.cell(i, j), kind) for i in range(region.axis1.n)])
    return out.getvalue()


MARGIN_COLUMNS = ("v_upper", "max_real", "sigma_margin", "c4_margin", "overshoot")


def margins_csv(region):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([region.axis1.path, region.axis2.path] + list(MARGIN_COLUMNS))
    for cell in region:
        row = [_number(cell.x), _number(cell.y)]
        for name in MARGIN_COLUMNS:
            value = cell.margins.get(name)
            row.append("" if value is None else _number(value))
        writer.writerow(row)
    return out.getvalue()


def errors_csv(region):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([region.axis1.path, region.axis2.path, "message"])
    for cell in region:
        for message in cell.errors:
            writer.writerow([_number(cell.x), _number(cell.y), message])
    return out.getvalue()


def gnuplot_script(region, csv_names):
    """
    :param csv_names: mapping of region kind to the CSV file name it was written to
    """
    lines = [
        "# regions of a {} sweep".format(region.mode.value),
        "set datafile separator ','",
        "set xlabel '{}'".format(region.axis1.path),
        "set ylabel '{}'".format(region.axis2.path),
        "set cbrange [-1:3]",
        "set palette defined (-1 'grey', 0 'red', 1 'green', 2 'white', 3 'black')",
    ]
    for kind, name in csv_names.items():
        lines.append("set title '{}'".format(kind))
        lines.append("plot '{}' nonuniform matrix with image notitle".format(name))
        lines.append("pause -1")
    return "\n".join(lines) + "\n"


def summary_text(region):
    counts = region.counts()
    lines = ["{} x {} cells ({} / {})".format(region.axis1.n, region.axis2.n, region.axis1.path, region.axis2.path)]
    for key in sorted(counts):
        lines.append("  {}: {}".format(key, counts[key]))
    return "\n".join(lines)


def _write(path, text):
    with open(path, "w", newline="") as file:
        file.write(text)
    log.info("Wrote %s", path)
    return path


def write_sweep_outputs(region, csv_path, gnuplot=False):
    """
    Write ``<stem>.<kind>.csv`` per evaluated verdict kind, ``<stem>.margins.csv``,
    ``<stem>.errors.csv`` when any cell failed and optionally ``<stem>.gp``.

    :return: list of written paths
    """
    stem, _ = os.path.splitext(csv_path)
    written = []
    names = {}
    for kind in region_kinds(region):
        path = "{}.{}.csv".format(stem, kind)
        written.append(_write(path, region_csv(region, kind)))
        names[kind] = os.path.basename(path)
    written.append(_write("{}.margins.csv".format(stem), margins_csv(region)))
    if any(cell.errors for cell in region):
        written.append(_write("{}.errors.csv".format(stem), errors_csv(region)))
    if gnuplot:
        written.append(_write("{}.gp".format(stem), gnuplot_script(region, names)))
    return written
