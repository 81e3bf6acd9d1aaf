"""Histogram of a simulated spectrum with the theoretical density overlaid.

A point mass at zero (from the density CSV header) is drawn as a vertical
marker annotated with its mass, and the eigenvalues belonging to it are
kept out of the histogram so the continuous parts are compared on the same
scale.  A bin-area audit (histogram area + drawn point mass) is printed to
stderr; it should come out at 1 within a couple of percent.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


class ParseError(ValueError):
    def __init__(self, path, lineno, msg):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.path = path
        self.lineno = lineno


@dataclass(frozen=True)
class FigureSpec:
    eig_csv: str
    density_csv: str
    output: str
    title: str = ""
    bins: int = 100


def read_eig_csv(path):
    vals = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if lineno == 1:
                if text != "lambda":
                    raise ParseError(path, lineno, f"expected header 'lambda', got {text!r}")
                continue
            try:
                vals.append(float(text))
            except ValueError:
                raise ParseError(path, lineno, f"not a number: {text!r}")
    if not vals:
        raise ParseError(path, 1, "no eigenvalues")
    return np.array(vals)


def read_density_csv(path):
    pm = 0.0
    xs, fs = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                if "point_mass_zero=" in text:
                    try:
                        pm = float(text.split("point_mass_zero=")[1])
                    except ValueError:
                        raise ParseError(path, lineno, "bad point_mass_zero value")
                continue
            if text == "x,f":
                continue
            parts = text.split(",")
            if len(parts) != 2:
                raise ParseError(path, lineno, f"expected 'x,f' pair, got {text!r}")
            try:
                xs.append(float(parts[0]))
                fs.append(float(parts[1]))
            except ValueError:
                raise ParseError(path, lineno, f"not numeric: {text!r}")
    return np.array(xs), np.array(fs), pm


def render_overlay(spec: FigureSpec) -> str:
    """Write the overlay figure; returns the output path."""
    vals = read_eig_csv(spec.eig_csv)
    xs, fs, pm = read_density_csv(spec.density_csv)
    total = len(vals)

    if pm > 0:
        atom_mask = np.abs(vals) < 1e-10 * (1.0 + np.abs(vals).max())
        body = vals[~atom_mask]
    else:
        body = vals

    fig, ax = plt.subplots(figsize=(7, 4.5))
    counts, edges = np.histogram(body, bins=spec.bins)
    widths = np.diff(edges)
    heights = counts / (total * widths)  # area = fraction of mass off the atom
    ax.bar(edges[:-1], heights, width=widths, align="edge",
           color="#9ecae1", edgecolor="#6baed6", linewidth=0.3,
           label="simulated spectrum")
    hist_area = float(np.sum(heights * widths))

    if xs.size:
        order = np.argsort(xs)
        ax.plot(xs[order], np.nan_to_num(fs[order]), color="red", lw=1.5,
                label="theoretical density")
    else:
        warnings.warn("empty density CSV, rendering histogram only")

    if pm > 0:
        ax.axvline(0.0, color="red", lw=2.0, linestyle="--")
        ax.annotate(f"mass {pm:.3f} at 0", xy=(0.0, ax.get_ylim()[1] * 0.9),
                    ha="left", xytext=(5, 0), textcoords="offset points",
                    color="red")

    ax.set_xlabel("eigenvalue (imaginary part)")
    ax.set_ylabel("density")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=130)
    plt.close(fig)

    audit = hist_area + pm
    print(f"bin-area audit: histogram area + point mass = {audit:.4f}",
          file=sys.stderr)
    return spec.output


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="render_overlay",
        description="histogram + theoretical density overlay")
    ap.add_argument("eig_csv")
    ap.add_argument("density_csv")
    ap.add_argument("output")
    ap.add_argument("--bins", type=int, default=100)
    ap.add_argument("--title", default="")
    args = ap.parse_args(argv)
    try:
        render_overlay(FigureSpec(eig_csv=args.eig_csv,
                                  density_csv=args.density_csv,
                                  output=args.output,
                                  title=args.title,
                                  bins=args.bins))
    except (ParseError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
