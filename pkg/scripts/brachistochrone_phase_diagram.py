"""PT phase of the two-level brachistochrone model over an (r sin theta, s) grid.

Prints CSV rows: r, s, theta, classification, re_lower, im_lower, re_upper, im_upper.
"""
import argparse
import sys

import numpy as np

from nhqm.linalg_core import eig_general
from nhqm.model_io import format_float, write_csv
from nhqm.models import Brachistochrone
from nhqm.symmetry import ParityOperator, classify_pt


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta", type=float, default=np.pi / 2)
    ap.add_argument("--points", type=int, default=21)
    ap.add_argument("--rmax", type=float, default=2.0)
    ap.add_argument("--smax", type=float, default=2.0)
    args = ap.parse_args(argv)
    rows = []
    for r in np.linspace(0, args.rmax, args.points):
        for s in np.linspace(0.1, args.smax, args.points):
            H = Brachistochrone(r, s, args.theta).hamiltonian()
            kind = classify_pt(H, ParityOperator.sigma_x()).kind
            lo, hi = eig_general(H).eigenvalues
            rows.append([r, s, args.theta, kind, lo.real, lo.imag, hi.real, hi.imag])
    header = ["r", "s", "theta", "classification", "re_lower", "im_lower", "re_upper", "im_upper"]
    sys.stdout.write(write_csv(header, rows))


if __name__ == "__main__":
    main()
