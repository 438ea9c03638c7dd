"""Profiles at t = 15, 23, 31, 39: diffusive width growth and the fate of the edge peaks."""

import argparse

import numpy as np

from aiiiwalk.config import parse_angle
from aiiiwalk.disorder import DisorderSpec
from aiiiwalk.ensemble import EnsembleConfig, run_ensemble
from aiiiwalk.observables import edge_peak_ratio, fit_profile

TIMES = (15, 23, 31, 39)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta", default="pi/8", type=parse_angle)
    ap.add_argument("--realizations", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for model in ("static_binary", "dephasing_binary"):
        cfg = EnsembleConfig(DisorderSpec(model, args.theta, base_seed=args.seed), n_realizations=args.realizations,
                             t_max=max(TIMES), input_spin="+", snapshots=TIMES)
        r = run_ensemble(cfg)
        sig2 = []
        print(model)
        for t in TIMES:
            rec = r.mean_probability[t]
            try:
                ex, ga = fit_profile(rec)
            except ValueError as err:
                print(f"  t={t:2d} fit undefined: {err}")
                continue
            sig2.append(ga.scale**2)
            print(f"  t={t:2d} lambda={ex.scale:7.2f} R2_exp={ex.fit_quality:.3f} sigma_t^2={ga.scale**2:8.1f} "
                  f"R2_gauss={ga.fit_quality:.3f} edge/bulk={edge_peak_ratio(rec.sites, rec.traced(), t):.2f}")
        if len(sig2) < len(TIMES):
            continue
        slope, icpt = np.polyfit(TIMES, sig2, 1)
        print(f"  sigma_t^2 ~ {slope:.2f} t + {icpt:.1f}")


if __name__ == "__main__":
    main()
