"""Zoo dichotomy: classify the four transport/transfer quantities per model.

Writes dichotomy.csv (model, quantity, L, value) and dichotomy.json with the
verdicts, then prints a verdict table.
"""

import argparse
import os

from jacobi_transport import experiments as ex
from jacobi_transport.output import csv_text, envelope, write_text
from jacobi_transport.spectral import EnergyGrid


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="results/dichotomy")
    p.add_argument("--grid", type=int, default=2000)
    p.add_argument("--L-list", default=",".join(map(str, ex.DEFAULT_L_LIST)))
    args = p.parse_args()

    L_list = [int(x) for x in args.L_list.split(",")]
    window = (-1.0, 1.0)
    verdicts = ex.dichotomy(L_list=L_list, window=window, grid=EnergyGrid(*window, args.grid))

    rows = []
    for name, by_q in verdicts.items():
        for q, v in by_q.items():
            rows += [(name, q, L, val) for L, val in zip(v.L_list, v.values)]
    data = {name: {q: v.to_dict() for q, v in by_q.items()} for name, by_q in verdicts.items()}
    write_text(os.path.join(args.out, "dichotomy.csv"), csv_text(["model", "quantity", "L", "value"], rows))
    write_text(os.path.join(args.out, "dichotomy.json"), envelope("dichotomy", data, {"window": window}))

    print(f"{'model':<20}" + "".join(f"{q:>30}" for q in ex.QUANTITIES) + f"{'expected':>20}")
    for name, by_q in verdicts.items():
        cells = "".join(f"{by_q[q].classification:>18} ({by_q[q].slope:+.1e})" for q in ex.QUANTITIES)
        print(f"{name:<20}{cells}{ex.EXPECTED_ZOO[name]:>20}")


if __name__ == "__main__":
    main()
