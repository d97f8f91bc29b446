"""|E_M| against separation at several temperatures, with both asymptotes.

Prints CSV: d, T, e_m (numeric), e_m_qm, e_m_T.  Low temperatures switch the
numeric path to the T = 0 integral automatically.
"""
import argparse
import csv
import sys

import numpy as np

from phononic_casimir import closedforms as cf
from phononic_casimir.lifshitz import LayerStack, energy_m
from phononic_casimir.materials import default_db


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--plate", default="Ge")
    ap.add_argument("--gap", default="Si")
    ap.add_argument("--temps", default="0,1,10,300", help="comma-separated K")
    ap.add_argument("--points", type=int, default=25)
    args = ap.parse_args()
    db = default_db()
    plate, gap = db[args.plate], db[args.gap]
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["d_m", "T_K", "e_m", "e_m_qm", "e_m_T"])
    for T in (float(t) for t in args.temps.split(",")):
        for d in map(float, np.geomspace(1e-9, 1e-6, args.points)):
            e = energy_m(LayerStack(plate, gap, d, T))
            out.writerow([repr(d), T, repr(e), repr(cf.e_m_quantum(gap, plate, d)),
                          repr(cf.e_m_thermal(gap, plate, d, T))])


if __name__ == "__main__":
    main()
