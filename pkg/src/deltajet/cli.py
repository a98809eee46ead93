"""Command line front end.

Reports are JSON lines.  Exit status is 0 when every check passes, 1 on an
assertion failure and 2 on a configuration or input error.
"""

import argparse
import json
import sys
from dataclasses import fields
from fractions import Fraction

from . import formal_groups as fg
from . import modular_forms as mf
from .base_rings import EisensteinConfig, PadicConfig, make_base_ring, make_ramified_ring
from .delta_calculus import conversion_polynomial
from .errors import ConfigError, DeltaJetError, MalformedFile, RelationViolation
from .jet_series import (
    overconvergence_defect,
    parse_dump,
    radius_estimate,
    to_ramified,
)
from .suites import SUITES, SuiteConfig, constrained_slope, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

# flag name -> (SuiteConfig field, type)
_FLAGS = {
    "p": ("p", int),
    "N": ("N", int),
    "pi": ("pi", str),
    "precision": ("K", int),
    "work_precision": ("K_work", int),
    "q_prec": ("Q", int),
    "jet_deg": ("D", int),
    "r": ("r", int),
    "seed": ("seed", int),
    "count": ("count", int),
}


def read_config_file(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def build_config(args):
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for k in _FLAGS:
        v = getattr(args, k, None)
        if v is not None:
            values[k] = v
    if getattr(args, "e", None) is not None:
        values["e"] = args.e
    cfg = SuiteConfig()
    known = {f.name for f in fields(SuiteConfig)}
    for k, v in values.items():
        if k == "e":
            continue
        if k not in _FLAGS:
            raise ConfigError(f"unknown configuration key {k!r}")
        name, typ = _FLAGS[k]
        assert name in known
        try:
            setattr(cfg, name, typ(v))
        except ValueError:
            raise ConfigError(f"bad value {v!r} for {k}") from None
    e = values.get("e")
    if e is not None:
        e = int(e)
        chosen = "pi" in values
        implied = "cyclotomic" if e == cfg.p - 1 else "sqrt" if e == 2 else "eisenstein:" + ",".join(
            [str(-cfg.p)] + ["0"] * (e - 1))
        if not chosen:
            cfg.pi = implied
        elif EisensteinConfig.parse(cfg.pi, cfg.p).e != e:
            raise ConfigError(f"--e {e} disagrees with --pi {cfg.pi}")
    PadicConfig(cfg.p, cfg.K)
    EisensteinConfig.parse(cfg.pi, cfg.p).validate(cfg.p)
    return cfg


def _emit(lines, out):
    text = "".join(line if line.endswith("\n") else line + "\n" for line in lines)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj):
    return json.dumps(obj, sort_keys=True, default=str)


def _rings(cfg, K=None):
    K = cfg.K_work if K is None else K
    base = make_base_ring(PadicConfig(cfg.p, K))
    return base, make_ramified_ring(PadicConfig(cfg.p, K), EisensteinConfig.parse(cfg.pi, cfg.p))


def _system(cfg, args, Q):
    if args.input:
        with open(args.input) as fh:
            h = mf.ingest(fh.read(), require_ap_one=True)
        if h.p != cfg.p:
            raise ConfigError(f"coefficient file is for p = {h.p}, not {cfg.p}")
        return h
    return mf.random_system(cfg.N, cfg.p, Q, cfg.seed)


def write_qseries_file(s, header):
    lines = [f"# {header}", f"# m c_m for m = 0..{s.Q}"]
    lines += [f"{m} {c}" for m, c in enumerate(s.coeffs)]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_run(args):
    cfg = build_config(args)
    rep = run_suite(args.suite, cfg)
    lines = [_json(r) for r in rep.records] + [_json(rep.summary())]
    _emit(lines, args.out)
    print(("PASS " if rep.passed else "FAIL ") + args.suite, file=sys.stderr)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_expand(args):
    cfg = build_config(args)
    p = cfg.p
    what = args.what
    if what in ("psi-p", "psi-pi"):
        D = args.terms or cfg.D or 4
        base, R = _rings(cfg)
        flavor = "p" if what == "psi-p" else "pi"
        s = fg.psi_series(base if flavor == "p" else R, flavor, D, cfg.Q or 1)
        text = s.dump()
    elif what in ("ep1", "unit-root"):
        Q = args.terms or cfg.Q or 20
        E = mf.eisenstein_Ep1(p, Q)
        s = E if what == "ep1" else mf.unit_root(E, p - 1, p)
        text = write_qseries_file(s, f"{what} p {p}")
    elif what == "conversion":
        _, R = _rings(cfg)
        data = conversion_polynomial(args.n, R)
        text = _json(data.report()) + "\n"
    elif what in ("fsharp-pi", "fsharp-p", "tau"):
        if cfg.pi != "cyclotomic" and what != "fsharp-pi":
            raise ConfigError("the trace expansions need --pi cyclotomic")
        Q = cfg.Q or p * p + 5 * p
        D = cfg.D or p + 1
        h = _system(cfg, args, Q + D + 1)
        _, R = _rings(cfg)
        fs = mf.expansion_fsharp_pi(h, R, Q, D, cfg.K)
        if what == "fsharp-pi":
            text = fs.series.dump()
        else:
            tr = mf.expansion_tau_and_fsharp_p(h, fs, Q, cfg.K)
            text = (tr.tau if what == "tau" else tr.fsharp_p).dump()
    else:
        raise ConfigError(f"unknown expansion {what!r}")
    if args.terms and what in ("psi-p", "psi-pi"):
        head = [ln for ln in text.splitlines() if ln.startswith("#")]
        body = [ln for ln in text.splitlines() if not ln.startswith("#")][: args.terms]
        text = "\n".join(head + body) + "\n"
    _emit([text], args.out)
    return EXIT_PASS


def cmd_hecke(args):
    if args.op != "T":
        raise ConfigError(f"unknown Hecke operator {args.op!r}")
    if not args.input:
        raise ConfigError("hecke needs --in with a coefficient file")
    with open(args.input) as fh:
        h = mf.ingest(fh.read())
    out = mf.hecke_T(args.kappa, args.M, args.n, h.as_qseries())
    _emit([write_qseries_file(out, f"T_({args.kappa},{args.M})({args.n}) of {h.source}")], args.out)
    return EXIT_PASS


def _read_series(args, cfg):
    if not args.input:
        raise ConfigError("this command needs --in with a series dump")
    with open(args.input) as fh:
        text = fh.read()

    def make_ring(header):
        p = int(header.get("p", cfg.p))
        K = int(header.get("K", cfg.K_work))
        kind = header.get("coefficients", "padic")
        if kind == "padic":
            return make_base_ring(PadicConfig(p, K))
        if kind.startswith("ramified "):
            return make_ramified_ring(PadicConfig(p, K), EisensteinConfig.parse(kind.split(" ", 1)[1], p))
        raise MalformedFile(f"unsupported coefficient ring {kind!r}")

    s, header = parse_dump(text, make_ring=make_ring)
    return s, header


def cmd_overconv(args):
    cfg = build_config(args)
    s, header = _read_series(args, cfg)
    p = s.ring.p
    R = s.ring.coeffs
    if not hasattr(R, "eis"):
        R = make_ramified_ring(PadicConfig(p, R.prec), EisensteinConfig.parse(cfg.pi, p))
        s = to_ramified(s, R)
    rep = overconvergence_defect(s, R)
    _emit([_json(dict(rep.as_dict(), overconvergent=rep.overconvergent)), rep.rewritten.dump()], args.out)
    return EXIT_PASS if rep.overconvergent else EXIT_FAIL


def cmd_radius(args):
    cfg = build_config(args)
    s, _ = _read_series(args, cfg)
    slope = Fraction(args.slope) if args.slope else None
    est = radius_estimate(s, slope)
    out = est.as_dict()
    out["constrained_slope"] = str(constrained_slope(s, 0))
    _emit([_json(out)], args.out)
    return EXIT_PASS


def cmd_synth(args):
    cfg = build_config(args)
    h = mf.random_system(cfg.N, cfg.p, cfg.Q or cfg.p * cfg.p + 5 * cfg.p, cfg.seed, kappa=args.kappa)
    _emit([mf.write_coefficient_file(h)], args.out)
    return EXIT_PASS


def cmd_ingest(args):
    if not args.input:
        raise ConfigError("ingest needs --in")
    with open(args.input) as fh:
        text = fh.read()
    try:
        h = mf.ingest(text, require_ap_one=args.require_ap_one)
    except RelationViolation as exc:
        _emit([_json({"check": "hecke-relations", "passed": False, "witness": f"a_{exc.n}", "detail": str(exc)})], args.out)
        return EXIT_FAIL
    _emit([_json({"check": "hecke-relations", "passed": True, "N": h.N, "p": h.p, "kappa": h.kappa, "Q": h.Q})], args.out)
    return EXIT_PASS


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common(sp):
    sp.add_argument("--config", help="flat key = value file; flags override it")
    sp.add_argument("--p", type=int)
    sp.add_argument("--N", type=int)
    sp.add_argument("--pi", help="cyclotomic, sqrt or eisenstein:a0,a1,...")
    sp.add_argument("--e", type=int, help="ramification degree; picks a uniformizer when --pi is absent")
    sp.add_argument("--precision", type=int, help="coefficient precision K of exact checks")
    sp.add_argument("--work-precision", dest="work_precision", type=int)
    sp.add_argument("--q-prec", dest="q_prec", type=int)
    sp.add_argument("--jet-deg", dest="jet_deg", type=int)
    sp.add_argument("--r", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--count", type=int)
    sp.add_argument("--in", dest="input")
    sp.add_argument("--out")


def build_parser():
    ap = argparse.ArgumentParser(prog="deltajet", description="Arithmetic jet calculus and its verification suites.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("run", help="run a named verification suite")
    sp.add_argument("suite", choices=sorted(SUITES))
    _common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("expand", help="print an expansion in the canonical dump format")
    sp.add_argument("what", choices=["psi-p", "psi-pi", "ep1", "unit-root", "conversion", "fsharp-pi", "fsharp-p", "tau"])
    sp.add_argument("--terms", type=int)
    sp.add_argument("--n", type=int, default=2, help="order of the conversion polynomial")
    _common(sp)
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("hecke", help="apply a Hecke operator to a coefficient file")
    sp.add_argument("--op", default="T")
    sp.add_argument("--kappa", type=int, default=2)
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--in", dest="input")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_hecke)

    sp = sub.add_parser("overconv", help="defect and rewritten series of a dump")
    _common(sp)
    sp.set_defaults(func=cmd_overconv)

    sp = sub.add_parser("radius", help="hull slope estimate of a dump")
    sp.add_argument("--slope", help="evaluate the intercept at this slope")
    _common(sp)
    sp.set_defaults(func=cmd_radius)

    sp = sub.add_parser("synth", help="write a synthetic Hecke coefficient file")
    sp.add_argument("--kappa", type=int, default=2)
    _common(sp)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("ingest", help="verify a Hecke coefficient file")
    sp.add_argument("--require-ap-one", action="store_true")
    sp.add_argument("--in", dest="input")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_ingest)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, MalformedFile, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DeltaJetError as exc:
        witness = getattr(exc, "witness", None)
        print(_json({"passed": False, "error": type(exc).__name__, "detail": str(exc), "witness": witness}))
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
