"""Central value and spectrum of the coproduct L-operator for ohat(3).

Prints lambda, lambda^2 against the common value of the 9x9 central
members, and the eigenvalues of the conjugated sum of diagonal blocks.

    python3 scripts/coproduct_structure.py --q 1 2 0.5
"""

import argparse

import numpy as np

from hatbraid.braidgen import make_spec
from hatbraid.lalg import central_elements, conjugate_sumLii, coproduct, fundamental_L, sum_diagonal


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=float, nargs="+", default=[1.0, 2.0, 0.5])
    args = ap.parse_args()

    spec = make_spec("ohat", 3)
    L = fundamental_L(spec, "plus")
    for q0 in args.q:
        Ln = L.numeric(q0)
        D = coproduct(Ln)
        rep = central_elements(D, spec)
        ev = np.sort(np.linalg.eigvals(sum_diagonal(D)).real)
        conj = conjugate_sumLii(spec, q0)
        print(f"q={q0:g}")
        print(f"  lambda            {Ln.lam0.real:+.10f}")
        print(f"  lambda^2          {(Ln.lam0 ** 2).real:+.10f}")
        print(f"  central value     {complex(rep.scalar_value).real:+.10f}"
              f"  (spread {rep.equality_residual:.1e}, commutator {rep.centrality_residual:.1e})")
        print("  eig sum L_ii      " + " ".join(f"{v:+.5f}" for v in ev))
        for c in conj.checks():
            print("  " + c.line())


if __name__ == "__main__":
    main()
