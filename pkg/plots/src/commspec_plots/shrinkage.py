"""Scatter of observed against theoretical shrinkage factors.

Input is a two-column CSV (theoretical, observed), one pair per row, with
or without a header line.  The identity line is drawn for reference.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .overlay import ParseError


def read_pairs_csv(path):
    theo, obs = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            parts = text.split(",")
            if len(parts) != 2:
                raise ParseError(path, lineno, f"expected two columns, got {text!r}")
            try:
                a, b = float(parts[0]), float(parts[1])
            except ValueError:
                if lineno == 1:
                    continue  # header line
                raise ParseError(path, lineno, f"not numeric: {text!r}")
            theo.append(a)
            obs.append(b)
    if not theo:
        raise ParseError(path, 1, "no data rows")
    return np.array(theo), np.array(obs)


def render_shrinkage(pairs_csv: str, output: str, title: str = "") -> str:
    theo, obs = read_pairs_csv(pairs_csv)
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    lo = min(theo.min(), obs.min(), 0.0)
    hi = max(theo.max(), obs.max(), 1.0)
    pad = 0.05 * (hi - lo)
    ax.plot([lo - pad, hi + pad], [lo - pad, hi + pad], color="gray",
            lw=1.0, linestyle="--", label="identity")
    ax.scatter(theo, obs, s=18, color="#3182bd", zorder=3, label="runs")
    ax.set_xlabel("theoretical shrinkage sqrt(1 - rho^2)")
    ax.set_ylabel("observed T_rho / T_0")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(output, dpi=130)
    plt.close(fig)
    return output


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="render_shrinkage",
        description="observed vs theoretical shrinkage scatter")
    ap.add_argument("pairs_csv")
    ap.add_argument("output")
    ap.add_argument("--title", default="")
    args = ap.parse_args(argv)
    try:
        render_shrinkage(args.pairs_csv, args.output, title=args.title)
    except (ParseError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
