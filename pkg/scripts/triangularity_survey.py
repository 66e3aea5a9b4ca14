"""Survey of the q values where R^2 = I, across families and dimensions.

    python3 scripts/triangularity_survey.py --max-dim 10
"""

import argparse
from collections import Counter

from hatbraid.braidgen import make_spec
from hatbraid.triangularity import build_problem, solve_roots, verify_triangular


def survey(families, max_dim, braid_max_dim):
    for fam in families:
        start = 3 if fam == "ohat" else 4
        step = 1 if fam == "ohat" else 2
        for N in range(start, max_dim + 1, step):
            spec = make_spec(fam, N)
            roots = solve_roots(build_problem(spec))
            kinds = Counter(r.kind for r in roots)
            orders = sorted({r.order for r in roots if r.order})
            worst = max(
                max(v for v in (ver.square_residual, ver.braid_residual) if v is not None)
                for ver in (verify_triangular(spec, r.value, braid=N <= braid_max_dim) for r in roots)
            )
            yield fam, N, len(roots), dict(kinds), orders, worst


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--families", nargs="+", default=["ohat", "phat"])
    ap.add_argument("--max-dim", type=int, default=10)
    ap.add_argument("--braid-max-dim", type=int, default=6,
                    help="skip the N^3-sized braid check above this dimension")
    args = ap.parse_args()

    print(f"{'spec':8} {'roots':>5}  {'orders of roots of unity':28} {'max residual':>12}  kinds")
    for fam, N, n, kinds, orders, worst in survey(args.families, args.max_dim, args.braid_max_dim):
        o = ", ".join(map(str, orders)) or "-"
        print(f"{fam}{N:<4} {n:5d}  {o:28} {worst:12.2e}  {kinds}")


if __name__ == "__main__":
    main()
