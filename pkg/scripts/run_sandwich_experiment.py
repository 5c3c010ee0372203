#!/usr/bin/env python3
"""Sensitivity sandwich sweep: per-point sensitivity versus its closed-form
lower/upper envelopes across N, for the ``bounds`` figure kind."""

import argparse

from infosens.features import make_rbf_grid
from infosens.harness import ExperimentConfig, cells_to_rows, emit, run_bounds_sweep


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="bounds_sweep.csv")
    parser.add_argument("--samples", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=20240903)
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    args = parser.parse_args()

    ec = ExperimentConfig(
        mode="bounds",
        feature_map=make_rbf_grid(10, -2.0, 2.0),
        n_grid=(2, 3, 5, 8, 13, 21, 34, 55),
        mc_samples=args.samples,
        seed=args.seed,
    )
    cells = run_bounds_sweep(ec)
    emit(cells_to_rows(cells), args.out, args.format)
    print(f"wrote {args.out}: N grid {ec.n_grid}, {args.samples} samples per cell")


if __name__ == "__main__":
    main()
