"""Empirical log-slopes of each quantity against L, for the zoo and the gapped period-2 chain."""

import argparse
import os

from jacobi_transport import experiments as ex
from jacobi_transport.output import envelope, write_text
from jacobi_transport.spectral import EnergyGrid


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="results/rates")
    p.add_argument("--grid", type=int, default=2000)
    args = p.parse_args()

    window = (-1.0, 1.0)
    models = {**ex.zoo(), "period-2": ex.period2_gapped()}
    verdicts = ex.dichotomy(models, window=window, grid=EnergyGrid(*window, args.grid))
    table = ex.rate_report(verdicts)
    write_text(os.path.join(args.out, "rates.csv"), table.to_csv())
    write_text(os.path.join(args.out, "rates.json"), envelope("rate-report", table.to_dict(), vars(args)))
    for model, q, slope, verdict, final in table.rows:
        print(f"{model:<20} {q:<28} slope={slope:+.3e} final={final:.3e} {verdict}")


if __name__ == "__main__":
    main()
