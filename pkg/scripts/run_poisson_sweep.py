"""Relative error at t_max versus M for the Poisson problem, both sizes.

    python3 scripts/run_poisson_sweep.py [--m-list 10:25] [--outdir results]
"""
import argparse
from pathlib import Path

from starexp.bench import emit_csv, load_configs, sweep_M
from starexp.cli import _m_list

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ("poisson_2500.toml", "poisson_49.toml")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--m-list", type=_m_list, default=list(range(10, 26)))
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)

    for name in CONFIGS:
        (cfg,) = load_configs(ROOT / "configs" / name)
        rows = sweep_M(cfg, args.m_list)
        print(f"# {cfg.example_id}: n={rows[0].n}, k={cfg.k}, t_max={cfg.t_max}")
        for r in rows:
            print(f"  M={r.M:3d}  {r.rel_err_tmax:.3e}")
        emit_csv(rows, out / (Path(name).stem + ".csv"))


if __name__ == "__main__":
    main()
