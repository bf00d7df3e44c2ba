"""Print optimal sensing times for the TV-band throughput study.

Usage: python3 scripts/optimal_sensing_times.py
"""

from gedsense import presets
from gedsense.optimizer import optimize_sensing_time


def main():
    print(f"{'case':<34}{'GED T*_o [ms]':>14}{'CED T*_o [ms]':>14}{'GED f* [b/s/Hz]':>17}")
    cases = [(f"B_k=B_i=6MHz, T_f={tf}s", presets.tv_band_throughput(tf)) for tf in presets.FRAME_SWEEP_S]
    for band in presets.BANDWIDTH_CASES:
        label = f"B_k={band.target_bandwidth / 1e6:g}MHz, B_i={band.white_bandwidth / 1e6:g}MHz, T_f=1.2s"
        cases.append((label, presets.tv_band_throughput(presets.BANDWIDTH_CASE_FRAME_S, band)))
    for label, cfg in cases:
        ged = optimize_sensing_time(cfg)
        ced = optimize_sensing_time(cfg, ced=True)
        print(f"{label:<34}{ged.sensing_time * 1e3:>14.2f}{ced.sensing_time * 1e3:>14.2f}{ged.max_throughput:>17.4f}")


if __name__ == "__main__":
    main()
