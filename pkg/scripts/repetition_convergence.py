"""LB current through N copies of a period cell against the crystalline current.

Default: the free period-1 cell between wide-band leads, N = 1..64.  Prints the
raw gap and the Cesaro mean over the tail N in [N/2, N].
"""

import argparse
import os

import numpy as np

from jacobi_transport import EnergyGrid, Lead, PeriodicJacobi, crystalline_current, repeated_sample_current
from jacobi_transport.output import csv_text, envelope, write_text


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="results/repetition")
    p.add_argument("--N-max", type=int, default=64)
    p.add_argument("--gamma", type=float, default=1.0, help="wide-band lead level width")
    p.add_argument("--grid", type=int, default=4000)
    args = p.parse_args()

    per = PeriodicJacobi(np.ones(1), np.zeros(1))
    leads = (Lead.wide_band(args.gamma), Lead.wide_band(args.gamma))
    window = (-1.0, 1.0)
    grid = EnergyGrid(*window, args.grid)
    cr = crystalline_current(per, leads, 1.0, window)
    Ns = np.arange(1, args.N_max + 1)
    cur = np.array([repeated_sample_current(per, leads, 1.0, int(N), window, grid).current for N in Ns])
    smoothed = np.array([cur[N // 2 - 1 if N > 1 else 0 : N].mean() for N in Ns])

    rows = zip(Ns, cur, smoothed, cur - cr, smoothed - cr)
    write_text(os.path.join(args.out, "repetition.csv"), csv_text(["N", "current", "cesaro", "gap", "cesaro_gap"], rows))
    data = {"crystalline": cr, "N": Ns, "current": cur, "cesaro": smoothed}
    write_text(os.path.join(args.out, "repetition.json"), envelope("repetition", data, vars(args)))
    print(f"crystalline current {cr:.8f}")
    for N in (1, 2, 4, 8, 16, 32, 64):
        if N <= args.N_max:
            print(f"N={N:<3} current={cur[N - 1]:.8f} gap={cur[N - 1] - cr:+.2e} cesaro gap={smoothed[N - 1] - cr:+.2e}")


if __name__ == "__main__":
    main()
