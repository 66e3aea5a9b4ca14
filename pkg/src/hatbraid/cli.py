"""Command-line entry point: ``hatbraid <subcommand> [options]``.

Exit codes: 0 success, 1 a residual exceeded its tolerance, 2 usage error.
Options may also come from a JSON config file whose keys mirror ``RunConfig``;
flags given on the command line take precedence.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import braidgen, lalg, links, ncspace, triangularity
from .errors import HatBraidError
from .report import Check

SCHEMA_VERSION = 1
TOL_ENV = "HATBRAID_TOL"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
BRAID_CHECK_MAX_N = 8      # triangular: the braid residual needs N^3 x N^3 products


@dataclass
class RunConfig:
    subcommand: str = ""
    family: str = "ohat"
    dim: int = 3
    q: str = "symbolic"
    tol: float = 1e-9
    cap: int = links.DEFAULT_CAP
    seed: int = 0
    format: str = "json"
    output: str | None = None
    params: dict = field(default_factory=dict)


class UsageError(Exception):
    pass


def parse_q(text: str):
    """``symbolic``, a real number, ``re,im`` or ``rootofunity:k`` (q = e^(2 pi i / k))."""
    text = str(text).strip()
    if text == "symbolic":
        return None
    if text.startswith("rootofunity:"):
        k = int(text.split(":", 1)[1])
        if k <= 0:
            raise UsageError("rootofunity needs a positive order")
        return cmath.exp(2j * math.pi / k)
    try:
        if "," in text:
            re_, im = text.split(",", 1)
            return complex(float(re_), float(im))
        return float(text)
    except ValueError as exc:
        raise UsageError(f"cannot parse q value {text!r}") from exc


def _jsonable(x):
    if isinstance(x, complex) or isinstance(x, np.complexfloating):
        x = complex(x)
        return [_round(x.real), _round(x.imag)]
    if isinstance(x, (float, np.floating)):
        return _round(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _round(v: float) -> float:
    return float(f"{v:.12g}") if math.isfinite(v) else v


def _checks_payload(checks: list[Check]) -> list[dict]:
    return [c.to_dict() for c in checks]


# subcommands; each returns (payload, passed, text lines)

def _spec(cfg: RunConfig):
    return braidgen.make_spec(cfg.family, cfg.dim)


def cmd_gen(cfg: RunConfig):
    spec = _spec(cfg)
    q0 = parse_q(cfg.q)
    what = cfg.params.get("what", "rhat")
    if what == "p0":
        m = braidgen.projector_p0prime(spec)
    elif what in ("rhat", "rhatinv"):
        m = braidgen.braid_matrix(spec, 1 if what == "rhat" else -1)
    elif what == "baxterized":
        if q0 is None:
            raise UsageError("baxterized needs a numeric q")
        m = braidgen.baxterized(spec, float(cfg.params.get("theta", 0.0)), q0)
    else:
        raise UsageError(f"unknown matrix {what!r}")
    if q0 is not None and what != "baxterized":
        m = braidgen.BraidMatrix(spec.N, m.numeric(q0), m.tag)
    payload = {"spec": spec.label, "T": spec.T.to_json(), "matrix": m.to_json()}
    lines = [f"{what} for {spec.label}: backend={m.backend}, dim={m.dim}"]
    return payload, True, lines


def cmd_verify(cfg: RunConfig):
    spec = _spec(cfg)
    q0 = parse_q(cfg.q)
    checks: list[Check] = []
    if q0 is None:
        checks.append(braidgen.check_braid_equation(braidgen.braid_matrix(spec, 1)))
        checks.append(braidgen.check_hecke(spec))
        checks.append(braidgen.check_projector_square(spec))
        checks.append(braidgen.check_inverse(spec))
        Lp = lalg.fundamental_L(spec, "plus")
        Lm = lalg.fundamental_L(spec, "minus")
        checks += [lalg.check_RLL(spec, Lp), lalg.check_RLL(spec, Lm), lalg.check_RLL(spec, Lp, Lm)]
        checks += links.check_eyb(links.enhancement(spec))
    else:
        R = braidgen.rhat_numeric(spec, q0, 1)
        checks.append(braidgen.check_braid_equation(R, cfg.tol))
        Lp = lalg.fundamental_L(spec, "plus").numeric(q0)
        Lm = lalg.fundamental_L(spec, "minus").numeric(q0)
        checks += [lalg.check_RLL(spec, Lp, tol=cfg.tol), lalg.check_RLL(spec, Lp, Lm, tol=cfg.tol)]
        if braidgen.has_real_eta(spec.T_at(q0)):
            checks.append(braidgen.check_baxterized_braid(spec, 0.3, 0.7, q0, cfg.tol))
    passed = all(c.passed for c in checks)
    return {"spec": spec.label, "q": cfg.q, "checks": _checks_payload(checks)}, passed, [c.line() for c in checks]


def cmd_triangular(cfg: RunConfig):
    spec = _spec(cfg)
    prob = triangularity.build_problem(spec)
    roots = triangularity.solve_roots(prob)
    rows, lines = [], [f"{spec.label}: {prob.variable}-polynomial {list(prob.reduced)} = {prob.target}"]
    passed = True
    for r in roots:
        ver = triangularity.verify_triangular(spec, r.value, braid=spec.N <= BRAID_CHECK_MAX_N)
        ok = r.residual < 1e-9 and ver.passed()
        passed &= ok
        rows.append({
            "q": r.value, "abs": abs(r.value), "arg_over_pi": cmath.phase(r.value) / math.pi,
            "kind": r.kind, "order": r.order, "branch": r.branch, "reduced_root": r.reduced_root,
            "residual": r.residual, "square_residual": ver.square_residual, "braid_residual": ver.braid_residual,
        })
        lines.append(f"  q={r.value.real:+.9f}{r.value.imag:+.9f}i  {r.describe():>14}  "
                     f"|T-2|={r.residual:.1e}  |R^2-I|={ver.square_residual:.1e}")
    payload = {"spec": spec.label, "variable": prob.variable, "polynomial": list(prob.reduced),
               "target": prob.target, "roots": rows}
    return payload, passed, lines


def cmd_lalg(cfg: RunConfig):
    spec = _spec(cfg)
    q0 = parse_q(cfg.q)
    check = cfg.params.get("check", "rll")
    Lp = lalg.fundamental_L(spec, "plus")
    Lm = lalg.fundamental_L(spec, "minus")
    if q0 is not None:
        Lp, Lm = Lp.numeric(q0), Lm.numeric(q0)
    extra = {}
    if check == "rll":
        checks = [lalg.check_RLL(spec, Lp, tol=cfg.tol), lalg.check_RLL(spec, Lm, tol=cfg.tol),
                  lalg.check_RLL(spec, Lp, Lm, tol=cfg.tol)]
    elif check == "central":
        rep = lalg.central_elements(Lp, spec)
        checks = rep.checks(cfg.tol) + [lalg.check_S1_S2(Lp, spec, cfg.tol)]
        extra["scalar_value"] = repr(rep.scalar_value) if Lp.exact else rep.scalar_value
    elif check == "coproduct":
        if q0 is None:
            raise UsageError("coproduct checks need a numeric q")
        D = lalg.coproduct(Lp)
        rep = lalg.central_elements(D, spec)
        checks = rep.checks(cfg.tol) + [
            lalg.check_S1_S2(D, spec, cfg.tol),
            Check("group-like", lalg.group_like_residual(spec, Lp), cfg.tol),
            lalg.check_RLL(spec, D, tol=cfg.tol),
        ]
        extra["scalar_value"] = rep.scalar_value
        extra["lambda_squared"] = Lp.lam0 ** 2
    elif check == "conjugate":
        if q0 is None:
            raise UsageError("the conjugation check needs a numeric q")
        rep = lalg.conjugate_sumLii(spec, q0)
        checks = rep.checks(cfg.tol)
    else:
        raise UsageError(f"unknown lalg check {check!r}")
    passed = all(c.passed for c in checks)
    payload = {"spec": spec.label, "q": cfg.q, "check": check, "checks": _checks_payload(checks), **extra}
    return payload, passed, [c.line() for c in checks]


def cmd_invariant(cfg: RunConfig):
    spec = _spec(cfg)
    q0 = parse_q(cfg.q)
    if q0 is None:
        raise UsageError("invariant needs a numeric q")
    E = links.enhancement(spec)
    word = links.BraidWord.parse(cfg.params.get("braid", ""), int(cfg.params.get("strands", 1)))
    value = links.link_invariant(E, word, q0, bool(cfg.params.get("allow_complex", False)), cfg.cap)
    payload = {"spec": spec.label, "q": cfg.q, "braid": str(word), "strands": word.strands,
               "writhe": word.writhe, "invariant": value}
    lines = [f"P = {_fmt_complex(value)}  (writhe {word.writhe})"]
    passed = True
    if cfg.params.get("skein") and word.letters:
        i = next((k for k, g in enumerate(word.letters) if g > 0), None)
        if i is not None:
            g = word.letters[i]
            wm = links.BraidWord(word.strands, word.letters[:i] + (-g,) + word.letters[i + 1:])
            w0 = links.BraidWord(word.strands, word.letters[:i] + word.letters[i + 1:])
            chk = links.check_skein(E, word, wm, w0, q0, cfg.tol)
            payload["skein"] = chk.to_dict()
            lines.append(chk.line())
            passed = chk.passed
    count = int(cfg.params.get("random_skein", 0) or 0)
    if count:
        rng = np.random.default_rng(cfg.seed)
        strands = max(word.strands, 2)
        rows = []
        for _ in range(count):
            wp, wm, w0 = links.random_skein_triple(rng, strands, int(rng.integers(1, 7)))
            chk = links.check_skein(E, wp, wm, w0, q0, cfg.tol)
            rows.append({"plus": str(wp), "minus": str(wm), "zero": str(w0), "residual": chk.residual})
            passed &= chk.passed
        worst = max(r["residual"] for r in rows)
        payload["random_skein"] = {"seed": cfg.seed, "triples": rows, "max_residual": worst}
        lines.append(f"{count} random skein triples (seed {cfg.seed}): max residual {worst:.3e}")
    return payload, passed, lines


def _fmt_complex(v: complex) -> str:
    v = complex(v)
    return f"{v.real:.10g}" if abs(v.imag) < 1e-12 else f"{v.real:.10g}{v.imag:+.10g}i"


def cmd_tower(cfg: RunConfig):
    spec = _spec(cfg)
    q0 = parse_q(cfg.q)
    if q0 is None:
        q0 = 1.0
    p = cfg.params
    choice = 1 if p.get("lambda", "plus") == "plus" else -1
    base = ncspace.base_cone_solution(float(p.get("a", 1.0)), float(p.get("b", 1.0)),
                                      int(p.get("sign", 1)), float(np.real(q0)), spec)
    levels = ncspace.tower(spec, base, int(p.get("levels", 3)), q0, choice)
    out, lines, passed = [], [], True
    for c in levels:
        chk = ncspace.check_coordinate_relation(spec, c, q0, max(cfg.tol, 1e-8))
        passed &= chk.passed
        entry = {"level": c.level, "dim": c.dim, "residual": chk.residual}
        if p.get("matrices", False):
            entry["coords"] = [np.asarray(x) for x in c.coords]
        out.append(entry)
        lines.append(f"level {c.level}: dim {c.dim}, relation residual {chk.residual:.3e}")
    return {"spec": spec.label, "q": q0, "lambda": p.get("lambda", "plus"), "levels": out}, passed, lines


def cmd_spectrum(cfg: RunConfig):
    spec = _spec(cfg)
    q0 = parse_q(cfg.q)
    if q0 is None:
        raise UsageError("spectrum needs a numeric q")
    sign = int(cfg.params.get("sign", 1))
    allow = bool(cfg.params.get("allow_complex", False))
    ev = braidgen.spectrum(spec, q0, sign, allow)
    ex = braidgen.expected_spectrum(spec, q0, sign)
    chk = Check("spectrum", float(np.abs(ev - ex).max()), max(cfg.tol, 1e-8))
    payload = {"spec": spec.label, "q": cfg.q, "sign": sign, "eigenvalues": ev, "expected": ex,
               "check": chk.to_dict()}
    return payload, chk.passed, [", ".join(_fmt_complex(v) for v in ev), chk.line()]


COMMANDS = {
    "gen": cmd_gen, "verify": cmd_verify, "triangular": cmd_triangular, "lalg": cmd_lalg,
    "invariant": cmd_invariant, "tower": cmd_tower, "spectrum": cmd_spectrum,
}

_PARAM_FLAGS = ("what", "theta", "check", "braid", "strands", "skein", "random_skein", "a", "b", "sign",
                "levels", "lambda", "matrices", "allow_complex")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields")
    common.add_argument("--family", choices=["ohat", "phat"])
    common.add_argument("--dim", type=int)
    common.add_argument("--q", help="symbolic | real | re,im | rootofunity:k")
    common.add_argument("--tol", type=float)
    common.add_argument("--cap", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=["json", "text"])
    common.add_argument("--output")
    common.add_argument("--allow-complex", dest="allow_complex", action="store_const", const=True)

    parser = argparse.ArgumentParser(prog="hatbraid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    g = sub.add_parser("gen", parents=[common])
    g.add_argument("--what", choices=["p0", "rhat", "rhatinv", "baxterized"])
    g.add_argument("--theta", type=float)
    sub.add_parser("verify", parents=[common])
    sub.add_parser("triangular", parents=[common])
    la = sub.add_parser("lalg", parents=[common])
    la.add_argument("--check", choices=["rll", "central", "coproduct", "conjugate"])
    inv = sub.add_parser("invariant", parents=[common])
    inv.add_argument("--braid")
    inv.add_argument("--strands", type=int)
    inv.add_argument("--skein", action="store_const", const=True)
    inv.add_argument("--random-skein", dest="random_skein", type=int, metavar="K",
                     help="also check K random skein triples drawn with --seed")
    tw = sub.add_parser("tower", parents=[common])
    tw.add_argument("--a", type=float)
    tw.add_argument("--b", type=float)
    tw.add_argument("--sign", type=int, choices=[1, -1])
    tw.add_argument("--levels", type=int)
    tw.add_argument("--lambda", choices=["plus", "minus"])
    tw.add_argument("--matrices", action="store_const", const=True)
    sp = sub.add_parser("spectrum", parents=[common])
    sp.add_argument("--sign", type=int, choices=[1, -1])
    return parser


def config_from_args(ns: argparse.Namespace, env: dict | None = None) -> RunConfig:
    env = os.environ if env is None else env
    data: dict = {}
    if env.get(TOL_ENV):
        data["tol"] = float(env[TOL_ENV])
    if ns.config:
        try:
            with open(ns.config) as fh:
                data.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from exc
    params = dict(data.pop("params", {}))
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for name in known - {"params", "subcommand"}:
        v = getattr(ns, name, None)
        if v is not None:
            data[name] = v
    for name in _PARAM_FLAGS:
        v = getattr(ns, name, None)
        if v is not None:
            params[name] = v
    data["subcommand"] = ns.subcommand
    data["params"] = params
    cfg = RunConfig(**data)
    cfg.q = str(cfg.q)
    return cfg


def render(cfg: RunConfig, payload: dict, passed: bool, lines: list[str]) -> str:
    if cfg.format == "text":
        status = "PASS" if passed else "FAIL"
        return "\n".join(lines + [f"{cfg.subcommand}: {status}"]) + "\n"
    doc = {"schema": f"hatbraid.{cfg.subcommand}/v{SCHEMA_VERSION}", "config": asdict(cfg),
           "passed": passed, "result": payload}
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"


def run(cfg: RunConfig) -> tuple[int, str]:
    payload, passed, lines = COMMANDS[cfg.subcommand](cfg)
    text = render(cfg, payload, passed, lines)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    return (EXIT_OK if passed else EXIT_FAIL), text


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        code, text = run(cfg)
    except (UsageError, HatBraidError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
