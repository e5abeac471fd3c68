"""Render MSE-scaling reports as a log-log scatter with fitted lines.

Input is one or more experiment report CSVs (header
``signal,estimator,n,N,mse_mean,mse_stderr``), each with a JSON sidecar next
to it (same name, ``.json`` suffix) holding the least-squares fit.  The
script plots ln(mse_mean) against ln(N) for every report and draws the
sidecar's fitted line as a dashed overlay.  No statistics happen here: the
slope shown in the legend is the sidecar's value verbatim, so the plot can
never disagree with the files it came from.

Usage: plot_mse.py report.csv [report2.csv ...] --out figure.png
"""

import argparse
import csv
import json
import math
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

EXPECTED_HEADER = ["signal", "estimator", "n", "N", "mse_mean", "mse_stderr"]
NUMERIC_COLUMNS = ["n", "N", "mse_mean", "mse_stderr"]


class ReportError(Exception):
    pass


def sidecar_path(csv_path):
    path = str(csv_path)
    return (path[: -len(".csv")] if path.endswith(".csv") else path) + ".json"


def load_report(path):
    """Parse one report CSV plus sidecar into a plain dict.

    Raises ReportError naming the offending column for any schema problem.
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ReportError(f"{path}: {exc}")
    if not rows:
        raise ReportError(f"{path}: empty file, expected header {EXPECTED_HEADER}")
    header = rows[0]
    if header != EXPECTED_HEADER:
        for col in EXPECTED_HEADER:
            if col not in header:
                raise ReportError(f"{path}: missing column {col!r}")
        raise ReportError(f"{path}: unexpected column order {header}")
    if len(rows) == 1:
        raise ReportError(f"{path}: no data rows under column 'n'")
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(EXPECTED_HEADER):
            raise ReportError(f"{path}: row {lineno} has {len(row)} fields")
        rec = dict(zip(EXPECTED_HEADER, row))
        for col in NUMERIC_COLUMNS:
            try:
                rec[col] = float(rec[col])
            except ValueError:
                raise ReportError(
                    f"{path}: non-numeric value {rec[col]!r} in column {col!r}"
                )
        if rec["N"] <= 0 or rec["mse_mean"] <= 0:
            raise ReportError(f"{path}: non-positive value in column 'mse_mean'/'N'")
        records.append(rec)
    try:
        with open(sidecar_path(path)) as fh:
            sidecar = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ReportError(f"{sidecar_path(path)}: {exc}")
    for key in ("slope", "intercept"):
        if key not in sidecar:
            raise ReportError(f"{sidecar_path(path)}: missing column {key!r}")
    return {
        "path": path,
        "signal": records[0]["signal"],
        "estimator": records[0]["estimator"],
        "records": records,
        "slope": sidecar["slope"],
        "intercept": sidecar["intercept"],
    }


def legend_label(report):
    # json round-trips floats through repr, so this reproduces the exact
    # token stored in the sidecar file
    return (f"{report['signal']}/{report['estimator']} "
            f"slope={json.dumps(report['slope'])}")


def render(reports, out_path, xlabel="ln N", ylabel="ln MSE"):
    """Draw all reports into one figure; returns the legend labels used."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    labels = []
    for report in reports:
        x = [math.log(r["N"]) for r in report["records"]]
        y = [math.log(r["mse_mean"]) for r in report["records"]]
        label = legend_label(report)
        labels.append(label)
        ax.scatter(x, y, label=label)
        if len(x) >= 2:
            xs = [min(x), max(x)]
            ax.plot(xs, [report["intercept"] + report["slope"] * v for v in xs],
                    linestyle="--")
        else:
            print(f"warning: {report['path']} has a single point, "
                  "skipping the fitted line", file=sys.stderr)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=100, metadata={"Software": "plot_mse"})
    plt.close(fig)
    return labels


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("reports", nargs="+", help="report CSV paths (overlaid)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--xlabel", default="ln N")
    parser.add_argument("--ylabel", default="ln MSE")
    args = parser.parse_args(argv)
    try:
        reports = [load_report(p) for p in args.reports]
        render(reports, args.out, args.xlabel, args.ylabel)
    except ReportError as exc:
        print(f"plot_mse: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
