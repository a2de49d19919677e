"""File formats: coefficient/signal/channel CSVs, reports, convergence logs.

Floats are written with ``repr`` (shortest round-trip form) so outputs are
byte-deterministic for a given config and recomputations from the files
reproduce reported numbers exactly.
"""

import json
from pathlib import Path

import numpy as np

from .bank import FilterBank, SerializedFilterBank


def _fmt(value):
    return repr(float(value))


def write_coefficients_csv(path, bank):
    """One row per channel filter: header ``channel,c0,...,c{N-1}``."""
    coeffs = bank.coefficients
    n = coeffs.shape[1]
    lines = ["channel," + ",".join(f"c{j}" for j in range(n))]
    for i, row in enumerate(coeffs):
        lines.append(f"{i}," + ",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_coefficients_csv(path, serialized=False):
    """Read a coefficient CSV back into a bank."""
    lines = Path(path).read_text().strip().splitlines()
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        rows.append((int(cells[0]), [float(v) for v in cells[1:]]))
    rows.sort()
    coeffs = np.array([r[1] for r in rows])
    return SerializedFilterBank(coeffs) if serialized else FilterBank(coeffs)


def write_signal_csv(path, x):
    """Single signal: header ``n,value``, index starting at 0."""
    lines = ["n,value"]
    lines += [f"{n},{_fmt(v)}" for n, v in enumerate(x)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_signal_csv(path):
    lines = Path(path).read_text().strip().splitlines()
    return np.array([float(line.split(",")[1]) for line in lines[1:]])


def write_channels_csv(path, w):
    """Channel matrix: header ``w0,...,w{M-1}``, one block per row."""
    w = np.asarray(w)
    lines = [",".join(f"w{i}" for i in range(w.shape[1]))]
    lines += [",".join(_fmt(v) for v in row) for row in w]
    Path(path).write_text("\n".join(lines) + "\n")


def write_trace_csv(path, energies):
    """Per-block residual energy: header ``block,residual_energy``."""
    lines = ["block,residual_energy"]
    lines += [f"{k},{_fmt(v)}" for k, v in enumerate(energies)]
    Path(path).write_text("\n".join(lines) + "\n")


def write_signals_csv(path, x, xhat):
    """Input and estimate side by side: header ``n,x,xhat``."""
    lines = ["n,x,xhat"]
    lines += [f"{n},{_fmt(a)},{_fmt(b)}" for n, (a, b) in enumerate(zip(x, xhat))]
    Path(path).write_text("\n".join(lines) + "\n")


def read_signals_csv(path):
    lines = Path(path).read_text().strip().splitlines()
    pairs = [line.split(",")[1:] for line in lines[1:]]
    x = np.array([float(a) for a, _ in pairs])
    xhat = np.array([float(b) for _, b in pairs])
    return x, xhat


def write_report_json(path, report):
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


def append_convergence_record(path, block, band, coefficients, max_abs_delta):
    """JSON-lines convergence log, one record per extraction and band."""
    record = {
        "block": int(block),
        "band": int(band),
        "coefficients": [float(v) for v in coefficients],
        "max_abs_delta_vs_previous": None if max_abs_delta is None else float(max_abs_delta),
    }
    with open(path, "a") as fh:
        fh.write(json.dumps(record) + "\n")
