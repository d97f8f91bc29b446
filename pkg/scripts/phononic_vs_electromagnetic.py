"""Phononic (thermal SH) and electromagnetic (T = 0) energies for three stacks.

For each plate|gap|plate stack prints d, e_m_T, e_em_qm, the closed-form
ratio estimate and the ratio with the full two-bracket EM integral.
"""
import csv
import sys

import numpy as np

from phononic_casimir import closedforms as cf
from phononic_casimir.materials import default_db

STACKS = [("Ge", "Si"), ("Diamond", "Si"), ("Diamond", "BN_hex")]


def main():
    db = default_db()
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["plate", "gap", "d_m", "e_m_T", "e_em_qm", "ratio_estimate", "ratio_full"])
    for p, g in STACKS:
        plate, gap = db[p], db[g]
        for d in map(float, np.geomspace(1e-9, 1e-7, 11)):
            em = cf.e_m_thermal(gap, plate, d, 300.0)
            ee = cf.e_em_quantum(gap.eps0, plate.eps0, d)
            out.writerow([p, g, repr(d), repr(em), repr(ee),
                          repr(cf.ratio_estimate(gap, plate, d, 300.0)), repr(em / ee)])


if __name__ == "__main__":
    main()
