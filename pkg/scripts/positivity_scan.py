"""Scan where the spectral-parameter braid matrix has only non-negative entries.

For real q > 0 the entries of R(theta) stay non-negative for -eta < theta < 0.
This prints, per (N, q), the smallest entry found inside that window and just
outside it on either side.

    python3 scripts/positivity_scan.py --dims 3 4 5 --q 0.3 1 2 5
"""

import argparse

import numpy as np

from hatbraid.braidgen import baxterized, eta_at, make_spec
from hatbraid.errors import PoleAtTheta


def min_entry(spec, theta, q0):
    try:
        m = baxterized(spec, theta, q0).entries
    except PoleAtTheta:
        return float("nan")
    return float(m.real.min())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--q", type=float, nargs="+", default=[0.3, 1.0, 2.0, 5.0])
    ap.add_argument("--samples", type=int, default=41)
    args = ap.parse_args()

    print(f"{'N':>2} {'q':>6} {'eta':>8} {'min inside':>12} {'below -eta':>12} {'above 0':>12}")
    for N in args.dims:
        spec = make_spec("ohat", N)
        for q0 in args.q:
            eta = eta_at(spec, q0).real
            inside = min(min_entry(spec, -f * eta, q0) for f in np.linspace(0.01, 0.99, args.samples))
            below = min_entry(spec, -1.2 * eta, q0)
            above = min_entry(spec, 0.2 * eta, q0)
            print(f"{N:2d} {q0:6g} {eta:8.4f} {inside:12.3e} {below:12.3e} {above:12.3e}")


if __name__ == "__main__":
    main()
