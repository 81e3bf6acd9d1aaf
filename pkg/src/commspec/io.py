"""File formats: measure JSON, eigenvalue CSV, density CSV, sample matrices.

Floats in CSV output carry 17 significant digits so written values
round-trip float64 exactly.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .measures import BivariateSpectralMeasure, ImagSpectrum, UnivariateSpectralMeasure

__all__ = [
    "measure_to_dict",
    "measure_from_dict",
    "load_measure",
    "save_measure",
    "write_spectrum_csv",
    "read_spectrum_csv",
    "write_density_csv",
    "read_density_csv",
    "write_matrix_csv",
    "read_matrix_csv",
    "write_matrix_bin",
    "read_matrix_bin",
    "read_matrix",
]

FLOAT_FMT = "%.17g"
MATRIX_MAGIC = b"CMSP0001"


def measure_to_dict(meas) -> dict:
    if isinstance(meas, BivariateSpectralMeasure):
        return {"atoms": [{"l1": a, "l2": b, "w": w} for a, b, w in meas.atoms()]}
    if isinstance(meas, UnivariateSpectralMeasure):
        return {"atoms": [{"l": a, "w": w} for a, w in meas.atoms()]}
    raise TypeError(f"not a spectral measure: {type(meas)!r}")


def measure_from_dict(d: dict):
    atoms = d["atoms"]
    if not atoms:
        raise ValueError("measure JSON has no atoms")
    if "l1" in atoms[0]:
        return BivariateSpectralMeasure(
            [(a["l1"], a["l2"], a["w"]) for a in atoms])
    return UnivariateSpectralMeasure([(a["l"], a["w"]) for a in atoms])


def load_measure(path):
    with open(path) as fh:
        return measure_from_dict(json.load(fh))


def save_measure(path, meas):
    with open(path, "w") as fh:
        json.dump(measure_to_dict(meas), fh, indent=1)
        fh.write("\n")


def write_spectrum_csv(path, spec_or_vals):
    vals = spec_or_vals.vals if isinstance(spec_or_vals, ImagSpectrum) else \
        np.asarray(spec_or_vals, dtype=float)
    with open(path, "w") as fh:
        fh.write("lambda\n")
        for v in vals:
            fh.write(FLOAT_FMT % v + "\n")


def read_spectrum_csv(path) -> ImagSpectrum:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "lambda":
            raise ValueError(f"{path}: expected header 'lambda', got {header!r}")
        vals = [float(line) for line in fh if line.strip()]
    return ImagSpectrum(vals)


def write_density_csv(path, curve):
    with open(path, "w") as fh:
        fh.write("# point_mass_zero=" + (FLOAT_FMT % curve.point_mass_zero) + "\n")
        fh.write("x,f\n")
        for x, f in zip(curve.xs, curve.fs):
            fh.write((FLOAT_FMT % x) + "," + (FLOAT_FMT % f) + "\n")


def read_density_csv(path):
    """Returns (xs, fs, point_mass_zero)."""
    pm = 0.0
    xs, fs = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "point_mass_zero=" in line:
                    pm = float(line.split("point_mass_zero=")[1])
                continue
            if line == "x,f":
                continue
            a, b = line.split(",")
            xs.append(float(a))
            fs.append(float(b))
    return np.array(xs), np.array(fs), pm


def write_matrix_csv(path, X):
    np.savetxt(path, np.asarray(X, dtype=float), delimiter=",", fmt=FLOAT_FMT)


def read_matrix_csv(path) -> np.ndarray:
    X = np.loadtxt(path, delimiter=",", ndmin=2)
    return np.asarray(X, dtype=float)


def write_matrix_bin(path, X):
    """Column-major float64 with an 8-byte magic and two u32 dims."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("matrix must be 2-d")
    p, n = X.shape
    with open(path, "wb") as fh:
        fh.write(MATRIX_MAGIC)
        fh.write(struct.pack("<II", p, n))
        fh.write(np.asfortranarray(X).tobytes(order="F"))


def read_matrix_bin(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MATRIX_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        p, n = struct.unpack("<II", fh.read(8))
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != p * n:
        raise ValueError(f"{path}: expected {p * n} values, found {data.size}")
    return data.reshape((p, n), order="F").copy()


def read_matrix(path) -> np.ndarray:
    """Sample matrix from CSV or from the binary format, by sniffing."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head == MATRIX_MAGIC:
        return read_matrix_bin(path)
    return read_matrix_csv(path)
