"""Error and timing rows for the generated test problems.

    python3 scripts/run_gallery.py [--out results/gallery.csv] [--only decaying-20,toeplitz-100]
"""
import argparse
from pathlib import Path

from starexp.bench import emit_csv, load_configs, run_experiment

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", default=str(ROOT / "configs" / "gallery.toml"))
    ap.add_argument("--out", default="results/gallery.csv")
    ap.add_argument("--only", help="comma-separated example ids")
    args = ap.parse_args()

    wanted = set(args.only.split(",")) if args.only else None
    rows = []
    for cfg in load_configs(args.config):
        if wanted and cfg.example_id not in wanted:
            continue
        for r in run_experiment(cfg):
            note = r.failure or f"{r.rel_err_tmax:.4e}"
            print(f"{r.example_id:<20} {r.method:8s} n={r.n:<5d} M={r.M:<3d} k={r.k:<3d} "
                  f"err={note} solve={r.solve_seconds:.4f}s eval={r.eval_seconds:.4f}s")
            rows.append(r)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    emit_csv(rows, args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
