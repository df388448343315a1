"""Command-line front end.

Exit codes: 0 ok, 2 invalid arguments, 3 memory budget, 4 failed numerical
certificate (tail bound, identity check, anomalous root).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BiasLabError, BudgetExceeded, CertificateError, InvalidArgument

EULER_ORACLE_TOL = 1e-9


def _fmt(x: float) -> str:
    return f"{x:.15g}"


class _Run:
    """Collects artifacts for one command and writes the manifest last."""

    def __init__(self, args: argparse.Namespace, stem: str):
        self.args = args
        self.out = Path(args.out)
        self.stem = stem
        self.files: list[str] = []
        self.t0 = getattr(args, "_t0", time.perf_counter())

    def write(self, suffix: str, text: str) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / f"{self.stem}{suffix}"
        path.write_text(text)
        self.files.append(str(path))
        return path

    def finish(self) -> Path:
        params = {k: v for k, v in sorted(vars(self.args).items()) if k not in ("func", "_t0")}
        manifest = {
            "command": self.args.command,
            "parameters": params,
            "artifacts": self.files,
            "wall_time_s": round(time.perf_counter() - self.t0, 3),
            "version": __version__,
        }
        path = self.out / f"{self.stem}.manifest.json"
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return path


def _csv_text(header_obj: dict, columns: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(header_obj, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([c if isinstance(c, (int, np.integer, str)) else _fmt(c) for c in r])
    return buf.getvalue()


def _poly(text: str, p: int):
    from .ff.poly import Poly

    return Poly.parse(text, p)


# commands -----------------------------------------------------------------


def cmd_race(args) -> int:
    from .arith import build_spf_sieve
    from .race import RaceConfig, detect_sign_changes, oscillation_stats, race_csv, run_race

    cfg = RaceConfig(args.q, args.a1, args.a2, args.k, args.qmax, args.stride, args.exponent)
    table = build_spf_sieve(max(2, args.qmax))
    points = run_race(cfg, table)
    rep = detect_sign_changes(points)
    run = _Run(args, f"race_q{args.q}_a{args.a1}_a{args.a2}_k{args.k}_Q{args.qmax}")
    run.write(".csv", race_csv(cfg, points))
    summary = json.loads(rep.to_json())
    summary["oscillations_per_log_T"] = oscillation_stats(rep, points[-1].Q) if points and points[-1].Q > 1 else 0.0
    summary["final_diff"] = points[-1].diff if points else 0.0
    summary["rows"] = len(points)
    run.write(".signs.json", json.dumps(summary, sort_keys=True) + "\n")
    run.finish()
    print(json.dumps({k: summary[k] for k in ("rows", "count", "final_diff")}, sort_keys=True))
    return 0


def cmd_constants(args) -> int:
    import sympy

    from .euler import constants_report

    rep = constants_report(args.q, args.k, args.tol, want_zero=args.q == 1 or sympy.isprime(args.q))
    if rep.tail_bound > args.tol:
        raise CertificateError(f"tail bound {rep.tail_bound} above tolerance {args.tol}")
    run = _Run(args, f"constants_q{args.q}_k{args.k}")
    text = rep.to_json()
    run.write(".json", text + "\n")
    run.finish()
    print(text)
    return 0


def cmd_verify_euler(args) -> int:
    from .arith import build_spf_sieve
    from .characters import build_character_group
    from .euler import series_oracle_discrepancy

    table = build_spf_sieve(max(2, args.depth))
    rows = []
    for chi in build_character_group(args.q):
        rows.append((list(chi.exponents), series_oracle_discrepancy(args.depth, chi, args.k, table)))
    worst = max(r[1] for r in rows)
    out = {"q": args.q, "k": args.k, "depth": args.depth, "max_discrepancy": worst,
           "per_character": [{"exponents": e, "discrepancy": d} for e, d in rows]}
    run = _Run(args, f"verify_euler_q{args.q}_k{args.k}_D{args.depth}")
    run.write(".json", json.dumps(out, sort_keys=True) + "\n")
    run.finish()
    print(f"max discrepancy {worst:.3e}")
    if worst > EULER_ORACLE_TOL:
        raise CertificateError(f"series identity discrepancy {worst} above {EULER_ORACLE_TOL}")
    return 0


def cmd_ffrace(args) -> int:
    from .ff.core import build_irreducibles, ff_summatory, k_admissible
    from .race import RacePoint, detect_sign_changes

    m = _poly(args.modulus, args.p)
    g1, g2 = _poly(args.g1, args.p), _poly(args.g2, args.p)
    irr = build_irreducibles(args.p, args.N)
    s1 = np.cumsum(ff_summatory(args.N, m, g1, args.k, irr).per_degree)
    s2 = np.cumsum(ff_summatory(args.N, m, g2, args.k, irr).per_degree)
    expo = 1 + 1 / (2 * args.k)
    rows, points = [], []
    for n in range(args.N + 1):
        d = float(s1[n] - s2[n])
        z = d / float(args.p) ** (n * expo)
        rows.append((n, float(s1[n]), float(s2[n]), d, z))
        points.append(RacePoint(n, float(s1[n]), float(s2[n]), d, z))
    rep = detect_sign_changes(points)
    header = {"p": args.p, "modulus": m.format(), "g1": g1.format(), "g2": g2.format(), "k": args.k,
              "N": args.N, "normalization_exponent": expo, "k_admissible": k_admissible(m, args.k)}
    run = _Run(args, f"ffrace_p{args.p}_m{m.format().replace(',', '-').replace('@', '_')}_k{args.k}_N{args.N}")
    run.write(".csv", _csv_text(header, ["N", "s1", "s2", "diff", "normalized"], rows))
    summary = json.loads(rep.to_json())
    summary.update(header)
    run.write(".signs.json", json.dumps(summary, sort_keys=True) + "\n")
    run.finish()
    print(json.dumps({"count": rep.count, "k_admissible": header["k_admissible"]}, sort_keys=True))
    return 0


def cmd_fflpoly(args) -> int:
    from .ff.core import build_ff_characters
    from .ff.lfunc import lpoly_report

    m = _poly(args.modulus, args.p)
    chars = build_ff_characters(m)
    reports = [lpoly_report(chi) for chi in chars]
    anomalous = sum(r.anomalous for r in reports)
    half_fail = sum(not r.half_ok for r in reports)
    out = {
        "p": args.p,
        "modulus": m.format(),
        "Phi": len(chars),
        "anomalous_roots": anomalous,
        "half_value_failures": half_fail,
        "characters": [r.to_dict() for r in reports],
    }
    run = _Run(args, f"fflpoly_p{args.p}_m{m.format().replace(',', '-').replace('@', '_')}")
    text = json.dumps(out, sort_keys=True, default=str)
    run.write(".json", text + "\n")
    run.finish()
    print(json.dumps({"Phi": len(chars), "anomalous_roots": anomalous, "half_value_failures": half_fail}))
    if anomalous:
        raise CertificateError(f"{anomalous} roots off |u| = q^-1/2 and |u| = 1")
    return 0


def cmd_ffmain(args) -> int:
    from .ff.core import build_irreducibles
    from .ff.lfunc import main_term_report

    m = _poly(args.modulus, args.p)
    g = _poly(args.g, args.p)
    if args.nmin > args.nmax:
        raise InvalidArgument("--nmin must not exceed --nmax")
    irr = build_irreducibles(args.p, args.nmax)
    rep = main_term_report(m, g, args.k, range(args.nmin, args.nmax + 1), irr)
    run = _Run(args, f"ffmain_p{args.p}_m{m.format().replace(',', '-').replace('@', '_')}_k{args.k}")
    text = rep.to_json()
    run.write(".json", text + "\n")
    run.finish()
    print(json.dumps({"paper_constant": rep.paper_constant, "series_constant": rep.series_constant,
                      "last_ratio": rep.empirical_ratios[-1][1]}))
    return 0


def cmd_quad(args) -> int:
    from .quad import make_field, quad_report

    field = make_field(args.d)
    rep = quad_report(field, args.k, args.x)
    run = _Run(args, f"quad_d{args.d}_k{args.k}_x{args.x}")
    text = json.dumps(rep, sort_keys=True)
    run.write(".json", text + "\n")
    run.finish()
    print(text)
    return 0


# parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="biaslab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="cap on worker threads")
    common.add_argument("--out", default=".", help="output directory")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("race", parents=[common], help="S_k(Q;q,a1) - S_k(Q;q,a2) sampled on a stride")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a1", type=int, required=True)
    p.add_argument("--a2", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--qmax", type=int, required=True)
    p.add_argument("--stride", type=int, default=None)
    p.add_argument("--exponent", type=float, default=None, help="normalization exponent (default 1 + 1/(2k))")
    p.set_defaults(func=cmd_race)

    p = sub.add_parser("constants", parents=[common], help="main-term constants c(q, a)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("verify-euler", parents=[common], help="coefficient check of the Euler factorization")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--depth", type=int, default=5000)
    p.set_defaults(func=cmd_verify_euler)

    p = sub.add_parser("ffrace", parents=[common], help="race between two classes mod m in F_p[X]")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--modulus", required=True, help='coefficients "c0,c1,...,cd@p"')
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_ffrace)

    p = sub.add_parser("fflpoly", parents=[common], help="L-polynomials and root locations for every character mod m")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--modulus", required=True)
    p.set_defaults(func=cmd_fflpoly)

    p = sub.add_parser("ffmain", parents=[common], help="leading constant of the F_p[X] summatory function")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--modulus", required=True)
    p.add_argument("--g", default="1")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--nmin", type=int, default=1)
    p.add_argument("--nmax", type=int, required=True)
    p.set_defaults(func=cmd_ffmain)

    p = sub.add_parser("quad", parents=[common], help="sum of F_k over ideals of Q(sqrt d)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--x", type=int, required=True)
    p.set_defaults(func=cmd_quad)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    args._t0 = time.perf_counter()
    if args.threads is not None:
        import numba

        if args.threads < 1:
            ap.error("--threads must be >= 1")
        numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
    try:
        return args.func(args)
    except BiasLabError as exc:
        print(f"biaslab: {exc}", file=sys.stderr)
        return exc.exit_code
    except MemoryError as exc:
        print(f"biaslab: out of memory: {exc}", file=sys.stderr)
        return BudgetExceeded.exit_code
    except ZeroDivisionError as exc:
        print(f"biaslab: {exc}", file=sys.stderr)
        return InvalidArgument.exit_code


if __name__ == "__main__":
    sys.exit(main())
