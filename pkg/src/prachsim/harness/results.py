"""CSV output and a matching plot script."""

import csv
import io
import math
from pathlib import Path

COLUMNS = (
    "scenario_kind",
    "target_snr_db",
    "interferer_snr_db",
    "interferer_param",
    "n_trials",
    "n_correct",
    "cdr",
    "ci_lo",
    "ci_hi",
    "n_false",
    "seed",
)


def _num(x):
    if isinstance(x, float) and math.isnan(x):
        return ""
    return f"{x:.6f}" if isinstance(x, float) else str(x)


def _snr(x):
    return "" if math.isnan(x) else f"{x:g}"


def results_csv(points):
    """CSV text for a list of :class:`CdrPoint`, LF line endings."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for p in points:
        lo, hi = p.wilson_ci_95
        w.writerow(
            [
                p.scenario_kind,
                _snr(p.snr_db),
                _snr(p.interferer_snr_db),
                p.interferer_param,
                p.n_trials,
                p.n_correct,
                _num(p.cdr),
                _num(lo),
                _num(hi),
                p.n_false,
                p.seed,
            ]
        )
    return buf.getvalue()


PLOT_SCRIPT = '''"""Plot CDR curves from {csv_name}. Run from the directory holding the CSV."""

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
curves = defaultdict(list)
with open(here / "{csv_name}", newline="") as fh:
    for row in csv.DictReader(fh):
        label = row["scenario_kind"]
        if row["interferer_snr_db"]:
            label += f" {{row['interferer_param']}} @ {{row['interferer_snr_db']}} dB"
        curves[label].append(
            (float(row["target_snr_db"]), float(row["cdr"]), float(row["ci_lo"]), float(row["ci_hi"]))
        )

fig, ax = plt.subplots(figsize=(7, 4.5))
for label, pts in curves.items():
    pts.sort()
    x = [p[0] for p in pts]
    y = [p[1] for p in pts]
    err = [[p[1] - p[2] for p in pts], [p[3] - p[1] for p in pts]]
    ax.errorbar(x, y, yerr=err, marker="o", ms=3, capsize=2, label=label)
ax.set_xlabel("target SNR (dB)")
ax.set_ylabel("correct detection rate")
ax.set_ylim(0, 1.02)
ax.grid(alpha=0.3)
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(here / "{png_name}", dpi=150)
print("wrote", here / "{png_name}")
'''


def emit_results(points, out_dir, name="cdr"):
    """Write ``<name>.csv`` and ``plot_<name>.py`` into ``out_dir``.

    Returns the two paths. The CSV is byte-identical for identical points.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{name}.csv"
    plot_path = out / f"plot_{name}.py"
    csv_path.write_bytes(results_csv(points).encode("utf-8"))
    script = PLOT_SCRIPT.format(csv_name=csv_path.name, png_name=f"{name}.png")
    plot_path.write_bytes(script.encode("utf-8"))
    return csv_path, plot_path
