"""Convergence of driven-oscillator quasi-energies in Fock truncation and step count."""
import argparse

import numpy as np

from nhqm.driven_oscillator import FockTruncation, OscillatorParams, build_hamiltonian, quasienergy_closed_form
from nhqm.floquet import floquet_decompose, unfold_to


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=float, default=0.1)
    ap.add_argument("--omega", type=float, default=2.0)
    ap.add_argument("--levels", type=int, default=4)
    ap.add_argument("--truncations", type=int, nargs="+", default=[20, 40, 80])
    ap.add_argument("--steps", type=int, nargs="+", default=[500, 1000, 4000])
    args = ap.parse_args(argv)
    p = OscillatorParams(lam=args.lam, omega=args.omega)
    exact = quasienergy_closed_form(p, np.arange(args.levels))
    print("truncation,steps,max_relative_error")
    for N in args.truncations:
        for steps in args.steps:
            fr = floquet_decompose(build_hamiltonian(p, FockTruncation(N)), p.period, steps)
            _, _, vals = unfold_to(fr.quasienergies, exact, p.period)
            print(f"{N},{steps},{np.max(np.abs(vals - exact) / np.abs(exact)):.3e}")


if __name__ == "__main__":
    main()
