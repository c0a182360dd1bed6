"""Measuring how ball-like near-minimizers are as N grows.

For each cardinality N the search produces a candidate minimizer X; we
record its capacity excess alpha_N over the best value ever seen (kept
in a JSON ledger), its scaled perimeter P_N, and the symmetric
difference to the best lattice-ball translate.  The fluctuation estimate
predicts

    #(X D (z + B_rN))  <=  C * N * (alpha_N^(1/2) + N^(-1/6) * P_N^(1/2))

so the ratio column should stay bounded as N grows.  Results land in a
CSV whose schema is fixed (see README).
"""
import tempfile
from pathlib import Path

from isocap import Ledger, run_fluctuation, write_fluctuation_csv

workdir = Path(tempfile.mkdtemp(prefix="isocap_demo_"))
ledger = Ledger(workdir / "ledger.json")
records = run_fluctuation([12, 33, 57, 100], d=3, seed=0, ledger=ledger)

print(f"{'N':>5} {'symDiff':>8} {'P_N':>7} {'bound':>9} {'ratio':>8}")
for r in records:
    print(f"{r.N:>5d} {r.symDiff:>8d} {r.PN:>7.3f} "
          f"{r.boundValue:>9.2f} {r.ratio:>8.4f}")

out = workdir / "fluctuation.csv"
write_fluctuation_csv(records, out)
print(f"\nCSV written to {out}")
print(f"ledger of best-known values: {ledger.path}")
