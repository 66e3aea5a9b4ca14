"""Link invariants of a few closed braids over a range of q.

    python3 scripts/invariant_table.py --family ohat --dim 3 --q 1 1.5 2 3
"""

import argparse

from hatbraid.braidgen import make_spec
from hatbraid.links import BraidWord, enhancement, link_invariant

WORDS = {
    "unknot": (1, ""),
    "unlink2": (2, ""),
    "hopf": (2, "1 1"),
    "trefoil": (2, "1 1 1"),
    "mirror trefoil": (2, "-1 -1 -1"),
    "figure eight": (3, "1 -2 1 -2"),
    "whitehead": (3, "1 1 -2 1 -2"),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", default="ohat", choices=["ohat", "phat"])
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--q", type=float, nargs="+", default=[1.0, 1.5, 2.0, 3.0])
    args = ap.parse_args()

    E = enhancement(make_spec(args.family, args.dim))
    print(f"{'link':16}" + "".join(f"{'q=' + format(q, 'g'):>16}" for q in args.q))
    for name, (m, text) in WORDS.items():
        w = BraidWord.parse(text, m)
        vals = [link_invariant(E, w, q).real for q in args.q]
        print(f"{name:16}" + "".join(f"{v:16.6f}" for v in vals))


if __name__ == "__main__":
    main()
