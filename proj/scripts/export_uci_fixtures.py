#!/usr/bin/env python3
"""Export the UCI breast-cancer and wine datasets bundled with scikit-learn
into the harness CSV format (f0..f{m-1},label). Values are written raw; the
campaign recipes apply min-max normalization at load time."""
import csv
import pathlib
import sys

from sklearn.datasets import load_breast_cancer, load_wine


def write(path, features, labels):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"f{j}" for j in range(features.shape[1])] + ["label"])
        for row, label in zip(features, labels):
            w.writerow([repr(float(v)) for v in row] + [label])


def main(out_dir):
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    bc = load_breast_cancer()
    # sklearn: 0 = malignant, 1 = benign; keep the original UCI letters.
    write(out / "bc.csv", bc.data, ["M" if t == 0 else "B" for t in bc.target])
    wine = load_wine()
    # binary: first cultivar against the other two
    write(out / "wine.csv", wine.data, ["1" if t == 0 else "0" for t in wine.target])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data")
