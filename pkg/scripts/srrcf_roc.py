"""ROC of the detector on a pulse-shaped QPSK signal whose rolloff region serves as the white band.

Usage: python3 scripts/srrcf_roc.py [--trials N] [--seed S]
"""

import argparse

from gedsense import presets
from gedsense.detector import threshold_for_pf
from gedsense.simulator import TrialSetup, reports_to_csv, simulate
from gedsense.spectral import plan_subbands


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--snr-db", type=float, nargs="+", default=[-24.0, -20.0, -16.0])
    args = p.parse_args()
    plan = plan_subbands(presets.SRRCF_BAND, presets.SRRCF_SENSING_TIME_S, "centered")
    for snr in args.snr_db:
        setup = TrialSetup(presets.SRRCF_SIGNAL, presets.channel(snr_db=snr), presets.noise(), plan,
                           presets.SRRCF_BAND.total_bandwidth, args.seed)
        stats = simulate(setup, args.trials)
        print(f"# SNR {snr:g} dB")
        print(reports_to_csv([stats.report(threshold_for_pf(pf)) for pf in (0.01, 0.05, 0.1, 0.2, 0.3)]), end="")


if __name__ == "__main__":
    main()
