"""Solution-norm curves ||exp(tA)v|| on a fine grid plus oracle spot values.

Writes one curve CSV per problem and a small CSV of dense reference
values at a few spot times, for overlay plotting.
"""
import argparse
import csv
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from starexp import GallerySpec, IntervalMap, emit_curve, expm_dense, generate, solve_arnoldi

PROBLEMS = [
    ("decaying_eig", 20, 4.0, 12, 19),
    ("toeplitz_tridiag", 100, 4.0, 25, 22),
    ("chebyshev_dense", 500, 4.0, 12, 20),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=100)
    ap.add_argument("--spots", type=int, default=5)
    ap.add_argument("--outdir", default="results/curves")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)

    for kind, n, t_max, M, k in PROBLEMS:
        A, v = generate(GallerySpec(kind, n))
        sol = solve_arnoldi(A, v, IntervalMap(0.0, t_max), M, k)
        emit_curve(sol, np.linspace(0.0, t_max, args.points), out / f"{kind}_{n}.csv")

        Ad = A.toarray() if sp.issparse(A) else A
        with open(out / f"{kind}_{n}_oracle.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "norm"])
            for t in np.linspace(0.0, t_max, args.spots):
                w.writerow([f"{t:.17g}", f"{np.linalg.norm(expm_dense(t * Ad) @ v):.17g}"])
        print(f"{kind} n={n}: curve and oracle written")


if __name__ == "__main__":
    main()
