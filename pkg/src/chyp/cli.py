"""Command-line front end: ``chyp eval | verify | table | jinv``.

Exit codes: 0 success, 1 a verification check failed, 2 a precondition
was violated (the message names it), 3 a numerical method failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import __version__, series, specfun
from .errors import NumericFailure, PreconditionError
from .geometry import SiegelPoint
from .lattice import Truncation
from .modular import (
    WeightIndex,
    eisenstein_km_partial,
    j_invariant,
    parse_index,
    verify_inversion_identity,
    verify_weight_additivity,
)
from .operator import StencilSpec
from .quadrature import QuadratureSpec
from .report import SpectralParam, jsonable
from .suites import SUITES, SuiteConfig, run_suite

EXIT_OK, EXIT_FAILED, EXIT_PRECONDITION, EXIT_NUMERIC = 0, 1, 2, 3

SPECFUN_NAMES = ("bessel_k", "gauss_2f1", "appell_f3", "appell_f3_integral", "whittaker_w",
                 "psi_confluent", "g_kernel", "h_kernel", "ramanujan_phi")


@dataclass
class RunConfig:
    """Everything a run depends on; two equal configs give byte-identical output."""

    command: str
    target: str
    n: int = 1
    s: complex | None = None
    split: tuple[complex, complex] | None = None
    k: int | None = None
    m: Fraction | None = None
    mu: int = 0
    Z: SiegelPoint | None = None
    Zp: SiegelPoint | None = None
    zeta: float | None = None
    eta: float | None = None
    rho: float | None = None
    args: tuple = ()
    kernel: str = "f3"
    cutoff: int = 2000
    truncation: Truncation = field(default_factory=Truncation)
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    stencil: StencilSpec = field(default_factory=StencilSpec)
    fmt: str = "json"
    out: str | None = None
    seed: int = 0
    quick: bool = False
    sweep: tuple[str, tuple[str, ...]] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError("--n must be >= 1")

    def as_dict(self) -> dict:
        return jsonable({
            "command": self.command, "target": self.target, "n": self.n, "s": self.s,
            "split": self.split, "k": self.k, "m": None if self.m is None else str(self.m),
            "mu": self.mu, "Z": self.Z, "Zp": self.Zp, "zeta": self.zeta, "eta": self.eta,
            "rho": self.rho, "args": list(self.args), "kernel": self.kernel, "cutoff": self.cutoff,
            "truncation": self.truncation.as_dict(), "quad": self.quad.as_dict(),
            "stencil": self.stencil.as_dict(), "seed": self.seed, "quick": self.quick,
        })


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def parse_complex(text: str) -> complex:
    """'2', '2,0.5' (re,im) or '2+0.5j'."""
    text = text.strip()
    try:
        if "," in text:
            re_, im_ = text.split(",")
            return complex(float(re_), float(im_))
        return complex(text.replace(" ", ""))
    except ValueError:
        raise PreconditionError(f"cannot read complex number {text!r}") from None


def parse_point(text: str, flag: str) -> SiegelPoint:
    try:
        return SiegelPoint.from_json(json.loads(text))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise PreconditionError(f"{flag}: expected {{\"z\": [[re, im], ...], \"zlast\": [re, im]}} ({exc})") from None


def _common(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, default=None, help="complex dimension n (default: from --Z, else 1)")
    p.add_argument("--s", help="spectral parameter, 're' or 're,im'")
    p.add_argument("--a", help="kernel split a (with --b, a + b = s)")
    p.add_argument("--b", help="kernel split b")
    p.add_argument("--k", type=int, help="weight k")
    p.add_argument("--m", help="index or Fourier mode (rational for modular forms, e.g. 3/2)")
    p.add_argument("--mu", type=int, default=0, help="Eisenstein exponent mu (0 or 1-n)")
    p.add_argument("--Z", help="point as JSON")
    p.add_argument("--Zp", help="second point as JSON")
    p.add_argument("--zeta", type=float, help="boundary point zeta (real)")
    p.add_argument("--eta", type=float, help="boundary point eta (real)")
    p.add_argument("--rho", type=float, help="rho (Fourier coefficients) or rho' (green-ratio)")
    p.add_argument("--args", help="comma-separated arguments for specfun.<name>; complex as 1+2j")
    p.add_argument("--kernel", default="f3", choices=("f3", "g1", "g2", "g3"), help="Poincare kernel")
    p.add_argument("--cutoff", type=int, default=2000, help="cutoff for the Ramanujan series phi_m")
    p.add_argument("--box", type=int, default=50, help="truncation box N")
    p.add_argument("--permutations", action="store_true", help="include the n! permutation block")
    p.add_argument("--h", type=float, default=1e-3, help="finite-difference step")
    p.add_argument("--order", type=int, default=2, choices=(2, 4), help="stencil order")
    p.add_argument("--tol", type=float, default=None, help="relative quadrature tolerance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", dest="fmt", default="json", choices=("json", "csv"))
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--quick", action="store_true", help="smaller samples for verification suites")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chyp", description="Automorphic functions on complex hyperbolic space.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    quantities = sorted(EVALUATORS) + [f"specfun.{n}" for n in SPECFUN_NAMES]
    ev = sub.add_parser("eval", help="evaluate one quantity")
    ev.add_argument("target", metavar="quantity", help="one of: " + ", ".join(quantities))
    _common(ev)
    ve = sub.add_parser("verify", help="run a verification suite")
    ve.add_argument("target", metavar="suite", choices=list(SUITES) + ["all"])
    _common(ve)
    ta = sub.add_parser("table", help="sweep one parameter of a quantity")
    ta.add_argument("target", metavar="quantity")
    ta.add_argument("--sweep", required=True, help="NAME=v1,v2,... with NAME one of the flags (box, m, s, rho, zeta, ...)")
    _common(ta)
    jv = sub.add_parser("jinv", help="j_m at a point, with its invariance checks")
    _common(jv)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    Z = parse_point(ns.Z, "--Z") if ns.Z else None
    Zp = parse_point(ns.Zp, "--Zp") if ns.Zp else None
    n = ns.n if ns.n is not None else (Z.n if Z is not None else 1)
    if Z is not None and Z.n != n:
        raise PreconditionError(f"--Z has n = {Z.n} but --n is {n}")
    split = None
    if (ns.a is None) != (ns.b is None):
        raise PreconditionError("--a and --b must be given together")
    if ns.a is not None:
        split = (parse_complex(ns.a), parse_complex(ns.b))
    if ns.box < 1:
        raise PreconditionError("--box must be >= 1")
    if ns.h <= 0:
        raise PreconditionError("--h must be positive")
    quad = QuadratureSpec() if ns.tol is None else QuadratureSpec(rel_tol=ns.tol)
    if ns.tol is not None and ns.tol <= 0:
        raise PreconditionError("--tol must be positive")
    args = tuple(parse_complex(a) for a in ns.args.split(";" if ";" in ns.args else ",")) if ns.args else ()
    sweep = None
    if getattr(ns, "sweep", None):
        name, _, vals = ns.sweep.partition("=")
        if not vals:
            raise PreconditionError("--sweep must look like NAME=v1,v2,...")
        sweep = (name.strip(), tuple(v.strip() for v in vals.split(",")))
    return RunConfig(
        command=ns.command, target=getattr(ns, "target", "jinv"), n=n,
        s=parse_complex(ns.s) if ns.s else None, split=split, k=ns.k,
        m=parse_index(ns.m) if ns.m is not None else None, mu=ns.mu, Z=Z, Zp=Zp,
        zeta=ns.zeta, eta=ns.eta, rho=ns.rho, args=args, kernel=ns.kernel, cutoff=ns.cutoff,
        truncation=Truncation(N=ns.box, include_permutations=ns.permutations, quad=quad),
        quad=quad, stencil=StencilSpec(h=ns.h, order=ns.order), fmt=ns.fmt, out=ns.out,
        seed=ns.seed, quick=ns.quick, sweep=sweep,
    )


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _need(cfg: RunConfig, *names: str):
    missing = [f"--{n}" for n in names if getattr(cfg, n) is None]
    if missing:
        raise PreconditionError(f"{cfg.target} needs {', '.join(missing)}")


def _int_mode(cfg: RunConfig) -> int:
    _need(cfg, "m")
    if cfg.m.denominator != 1:
        raise PreconditionError("Fourier mode --m must be an integer")
    return int(cfg.m)


def _spectral(cfg: RunConfig) -> SpectralParam:
    _need(cfg, "s")
    return SpectralParam(cfg.s, cfg.n, cfg.split)


def _eval_eisenstein(cfg):
    _need(cfg, "Z")
    sp = _spectral(cfg)
    val = series.eisenstein_partial(cfg.Z, sp, cfg.mu, cfg.truncation)
    extra = {}
    if sp.s.real + cfg.mu > 1:
        extra["tail_bound"] = series.eisenstein_tail_bound(cfg.Z, sp, cfg.mu, cfg.truncation.N)
    return val, extra


def _eval_eisenstein_km(cfg):
    _need(cfg, "Z", "k", "m")
    return eisenstein_km_partial(cfg.Z, WeightIndex(cfg.k, cfg.m), cfg.truncation), {}


def _eval_poincare(cfg):
    _need(cfg, "Z", "Zp")
    sp = _spectral(cfg)
    return series.poincare_partial(cfg.Z, cfg.Zp, sp, cfg.truncation, split=cfg.split, kind=cfg.kernel), \
        {"split": sp.kernel_split(), "kernel": cfg.kernel}


def _eval_poisson(cfg):
    _need(cfg, "Z", "zeta")
    return series.poisson_kernel(cfg.Z, cfg.zeta), {}


def _eval_boundary_eisenstein(cfg):
    _need(cfg, "Z", "zeta")
    return series.boundary_eisenstein_partial(cfg.Z, cfg.zeta, _spectral(cfg), cfg.truncation), {}


def _eval_scattering(cfg):
    _need(cfg, "zeta", "eta")
    return series.scattering_partial(cfg.zeta, cfg.eta, _spectral(cfg), cfg.truncation, cfg.n), {}


def _eval_jinv(cfg):
    _need(cfg, "Z", "m")
    return j_invariant(cfg.Z, cfg.m, cfg.truncation), {}


def _eval_fourier_a(cfg):
    _need(cfg, "rho")
    return series.fourier_a_m(_int_mode(cfg), cfg.rho, _spectral(cfg), cfg.n, cfg.cutoff), {}


def _eval_fourier_b(cfg):
    _need(cfg, "rho")
    return series.fourier_b_m(_int_mode(cfg), cfg.rho, _spectral(cfg), cfg.n, cfg.cutoff, cfg.quad), {}


def _eval_green(cfg):
    _need(cfg, "Z", "Zp")
    return series.green_kernel(cfg.Z, cfg.Zp, _spectral(cfg)), {}


def _eval_green_ratio(cfg):
    """(rho')^-s G_0(Z, Z') / P(Z, t')^s with Z' = (0, t' + i rho'), t' = --zeta."""
    _need(cfg, "Z", "zeta", "rho")
    sp = _spectral(cfg)
    Zp = SiegelPoint([0.0] * cfg.n, complex(cfg.zeta, cfg.rho))
    val = cfg.rho ** (-sp.s) * series.green_kernel(cfg.Z, Zp, sp) / series.poisson_kernel(cfg.Z, cfg.zeta) ** sp.s
    return val, {"Zp": Zp}


EVALUATORS: dict[str, Callable[[RunConfig], tuple]] = {
    "eisenstein": _eval_eisenstein,
    "eisenstein-km": _eval_eisenstein_km,
    "poincare": _eval_poincare,
    "poisson": _eval_poisson,
    "boundary-eisenstein": _eval_boundary_eisenstein,
    "scattering": _eval_scattering,
    "jinv": _eval_jinv,
    "fourier-a": _eval_fourier_a,
    "fourier-b": _eval_fourier_b,
    "green": _eval_green,
    "green-ratio": _eval_green_ratio,
}


def _eval_specfun(cfg: RunConfig):
    name = cfg.target.split(".", 1)[1]
    if name not in SPECFUN_NAMES:
        raise PreconditionError(f"unknown special function {name!r}; choose from {', '.join(SPECFUN_NAMES)}")
    a = list(cfg.args)
    fn = getattr(specfun, name)
    try:
        if name in ("bessel_k", "whittaker_w", "psi_confluent", "appell_f3_integral"):
            if name in ("whittaker_w", "psi_confluent"):
                a[-1] = a[-1].real
            return fn(*a, cfg.quad), {}
        if name == "h_kernel":
            return fn(a[0], int(a[1].real)), {}
        if name == "ramanujan_phi":
            return fn(int(a[0].real), a[1], int(a[2].real) if len(a) > 2 else cfg.cutoff), {}
        return fn(*a), {}
    except (TypeError, IndexError):
        raise PreconditionError(f"wrong number of --args for specfun.{name}") from None


def evaluate(cfg: RunConfig):
    if cfg.target.startswith("specfun."):
        return _eval_specfun(cfg)
    if cfg.target not in EVALUATORS:
        raise PreconditionError(f"unknown quantity {cfg.target!r}; choose from "
                                + ", ".join(sorted(EVALUATORS)) + ", specfun.<name>")
    return EVALUATORS[cfg.target](cfg)


def _split_value(v) -> tuple[float, float]:
    v = complex(v)
    return v.real, v.imag


def _provenance(cfg: RunConfig) -> dict:
    return {"version": __version__, "config": cfg.as_dict()}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_eval(cfg: RunConfig) -> tuple[int, str]:
    value, extra = evaluate(cfg)
    re_, im_ = _split_value(value)
    if cfg.fmt == "csv":
        return EXIT_OK, _csv([("quantity", "value_re", "value_im"), (cfg.target, repr(re_), repr(im_))])
    doc = {"quantity": cfg.target, "value": jsonable(value), "value_re": re_, "value_im": im_,
           "details": jsonable(extra), "provenance": _provenance(cfg)}
    return EXIT_OK, _json(doc)


def cmd_verify(cfg: RunConfig) -> tuple[int, str]:
    scfg = SuiteConfig(n=cfg.n, seed=cfg.seed, quick=cfg.quick, stencil=cfg.stencil,
                       s=cfg.s)
    reports = run_suite(cfg.target, scfg)
    failed = sum(not r.passed for r in reports)
    code = EXIT_FAILED if failed else EXIT_OK
    if cfg.fmt == "csv":
        rows = [("check", "paper_ref", "max_residual", "tolerance", "pass")]
        rows += [(r.check, r.paper_ref, repr(float(r.max_residual)), repr(r.tolerance), str(r.passed).lower())
                 for r in reports]
        return code, _csv(rows)
    doc = {"suite": cfg.target, "reports": [r.to_json() for r in reports],
           "summary": {"checks": len(reports), "failed": failed, "pass": failed == 0},
           "provenance": _provenance(cfg)}
    return code, _json(doc)


_SWEEPABLE = {
    "box": lambda cfg, v: _replace_truncation(cfg, int(v)),
    "m": lambda cfg, v: setattr(cfg, "m", parse_index(v)),
    "s": lambda cfg, v: setattr(cfg, "s", parse_complex(v)),
    "k": lambda cfg, v: setattr(cfg, "k", int(v)),
    "mu": lambda cfg, v: setattr(cfg, "mu", int(v)),
    "rho": lambda cfg, v: setattr(cfg, "rho", float(v)),
    "zeta": lambda cfg, v: setattr(cfg, "zeta", float(v)),
    "eta": lambda cfg, v: setattr(cfg, "eta", float(v)),
    "cutoff": lambda cfg, v: setattr(cfg, "cutoff", int(v)),
}


def _replace_truncation(cfg: RunConfig, N: int):
    t = cfg.truncation
    cfg.truncation = Truncation(N=N, include_permutations=t.include_permutations, quad=t.quad)


def cmd_table(cfg: RunConfig) -> tuple[int, str]:
    if cfg.sweep is None:
        raise PreconditionError("table needs --sweep NAME=v1,v2,...")
    name, values = cfg.sweep
    if name not in _SWEEPABLE:
        raise PreconditionError(f"cannot sweep {name!r}; choose from {', '.join(_SWEEPABLE)}")
    rows = []
    for v in values:
        try:
            _SWEEPABLE[name](cfg, v)
        except ValueError:
            raise PreconditionError(f"bad sweep value {v!r} for {name}") from None
        value, _ = evaluate(cfg)
        rows.append((v, *_split_value(value)))
    if cfg.fmt == "csv":
        return EXIT_OK, _csv([(name, "value_re", "value_im")] + [(v, repr(a), repr(b)) for v, a, b in rows])
    doc = {"quantity": cfg.target, "sweep": name,
           "rows": [{name: v, "value_re": a, "value_im": b} for v, a, b in rows],
           "provenance": _provenance(cfg)}
    return EXIT_OK, _json(doc)


def cmd_jinv(cfg: RunConfig) -> tuple[int, str]:
    _need(cfg, "Z", "m")
    value = j_invariant(cfg.Z, cfg.m, cfg.truncation)
    checks = [verify_weight_additivity(cfg.Z, cfg.m, cfg.truncation),
              verify_inversion_identity(cfg.Z, WeightIndex(4, cfg.m), cfg.truncation),
              verify_inversion_identity(cfg.Z, WeightIndex(6, Fraction(3, 2) * cfg.m), cfg.truncation)]
    code = EXIT_OK if all(c.passed for c in checks) else EXIT_FAILED
    if cfg.fmt == "csv":
        return code, _csv([("value_re", "value_im", "box"), (repr(value.real), repr(value.imag), cfg.truncation.N)])
    doc = {"value_re": value.real, "value_im": value.imag, "box": cfg.truncation.N, "m": str(cfg.m),
           "checks": [c.to_json() for c in checks], "provenance": _provenance(cfg)}
    return code, _json(doc)


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "table": cmd_table, "jinv": cmd_jinv}


def _json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _csv(rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        code, text = COMMANDS[cfg.command](cfg)
    except PreconditionError as exc:
        print(f"chyp: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except NumericFailure as exc:
        print(f"chyp: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def jinv_main(argv: Sequence[str] | None = None) -> int:
    """Entry point for the standalone ``jinv`` command."""
    args = list(sys.argv[1:] if argv is None else argv)
    return main(["jinv", *args])


if __name__ == "__main__":
    sys.exit(main())
