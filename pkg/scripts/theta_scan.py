"""Profile-shape and edge-peak diagnostics as a function of the binary coin angle."""

import argparse

import numpy as np

from aiiiwalk.disorder import DisorderSpec
from aiiiwalk.ensemble import EnsembleConfig, run_ensemble
from aiiiwalk.observables import edge_peak_ratio, fit_profile


def diagnostics(theta, seed, n_real):
    row = {}
    for model in ("static_binary", "dephasing_binary"):
        r = run_ensemble(EnsembleConfig(DisorderSpec(model, theta, base_seed=seed), n_realizations=n_real,
                                        t_max=39, input_spin="+", snapshots=(14, 15, 39)))
        try:
            ex, ga = fit_profile(r.mean_probability[14])
            row[model] = (ex.fit_quality, ga.fit_quality, ex.loglog_slope)
        except ValueError:
            row[model] = (np.nan, np.nan, np.nan)
        if model == "dephasing_binary":
            row["edge"] = [edge_peak_ratio(r.mean_probability[t].sites, r.mean_probability[t].traced(), t) for t in (15, 39)]
    return row


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--realizations", type=int, default=500)
    args = ap.parse_args()
    print("theta/pi  static(R2e R2g loglog)   dephasing(R2e R2g loglog)   edge/bulk t=15 t=39")
    for frac in (1 / 8, 5 / 32, 3 / 16, 7 / 32, 1 / 4):
        d = diagnostics(frac * np.pi, args.seed, args.realizations)
        s, g = d["static_binary"], d["dephasing_binary"]
        print(f"{frac:8.4f}  {s[0]:.3f} {s[1]:.3f} {s[2]:5.2f}      {g[0]:.3f} {g[1]:.3f} {g[2]:5.2f}        "
              f"{d['edge'][0]:.2f} {d['edge'][1]:.2f}")


if __name__ == "__main__":
    main()
