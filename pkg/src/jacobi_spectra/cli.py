"""
Command line front end.

Every command reads one JSON job file (``--config``) and writes JSON, or
CSV for grid scans, to ``--out`` (stdout when omitted). A relative
``--out`` is placed under ``$JACOBI_SPECTRA_OUT_DIR`` when that is set.
Complex numbers are written as ``[re, im]`` and every float with 17
significant digits, so output re-parses to the same bits.

Exit codes: 0 ok, 2 bad configuration, 3 numerical failure,
4 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .background import POLE, BorgData, evaluate, normal_form, reconstruct, weyl_solution
from .errors import ContourError, ConvergenceError, JacobiSpectraError, PoleProximityError, ValidationError
from .jost import solve_backsub, solve_series
from .perturbation import Perturbation, moments
from .regions import Rect, constants, criterion_first_moment_empty, first_moment_lhs, scan
from .suite import run_invariant_suite
from .verify import Circle, random_perturbation, truncated_eigs, winding

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_INVARIANT = 4

OUT_DIR_ENV = "JACOBI_SPECTRA_OUT_DIR"

CSV_HEADER = "re,im,abs_w,lhs,in_G,excluded"


# ----------------------------------------------------------------- output


def format_float(x: float) -> str:
    """17 significant digits; ``nan``/``inf`` become JSON ``null``."""
    x = float(x)
    if not math.isfinite(x):
        return "null"
    if x == int(x) and abs(x) < 1e16:
        return repr(float(x))
    return format(x, ".17g")


def dumps(obj, indent=2, _level=0) -> str:
    """JSON text with fixed float formatting and complex numbers as pairs."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or obj is POLE:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{format_float(obj.real)}, {format_float(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (bool, int, float, complex, np.number, np.bool_)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def region_csv(report) -> str:
    lines = [CSV_HEADER]
    for smp in report.samples:
        lhs = "" if smp.lhs is None else format_float(smp.lhs)
        lines.append(
            ",".join(
                [
                    format_float(smp.lam.real),
                    format_float(smp.lam.imag),
                    format_float(smp.abs_w),
                    lhs,
                    "1" if smp.in_G else "0",
                    "1" if smp.excluded else "0",
                ]
            )
        )
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------- config


class ConfigError(ValidationError):
    """Job file does not match the expected layout."""


def _field(d, key, where, required=True, default=None):
    if key in d:
        return d[key]
    if required:
        raise ConfigError(f"{where}: missing field '{key}'")
    return default


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {x!r}")
    return float(x)


def parse_complex(x, where) -> complex:
    """A real number or an ``[re, im]`` pair."""
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ConfigError(f"{where}: complex values are [re, im] pairs, got {x!r}")
        return complex(_number(x[0], where), _number(x[1], where))
    return complex(_number(x, where), 0.0)


def _complex_list(xs, where):
    if not isinstance(xs, list):
        raise ConfigError(f"{where}: expected a list")
    return [parse_complex(x, f"{where}[{i}]") for i, x in enumerate(xs)]


@dataclass
class JobConfig:
    """Parsed job file; ``raw`` keeps the command-specific blocks as given."""

    borg: BorgData
    shift: float = 0.0
    perturbation: Perturbation | None = None
    random: dict | None = None
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict):
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be a JSON object")
        if "borg" in data:
            b = data["borg"]
            if not isinstance(b, dict):
                raise ConfigError("borg: expected an object")
            eps = _field(b, "eps", "borg")
            if eps not in (1, -1):
                raise ConfigError(f"borg.eps: must be +1 or -1, got {eps!r}")
            borg = BorgData(
                s=_number(_field(b, "s", "borg"), "borg.s"),
                d=_number(_field(b, "d", "borg"), "borg.d"),
                nu=_number(_field(b, "nu", "borg"), "borg.nu"),
                eps=eps,
            )
            shift = 0.0
        elif "bands" in data:
            nb = data["bands"]
            if not isinstance(nb, dict):
                raise ConfigError("bands: expected an object with 'intervals', 'nu', 'eps'")
            borg, shift = normal_form(
                _field(nb, "intervals", "bands"),
                _number(_field(nb, "nu", "bands"), "bands.nu"),
                _field(nb, "eps", "bands"),
            )
        else:
            raise ConfigError("config: need a 'borg' block or a 'bands' block")
        pert = None
        if "perturbation" in data:
            p = data["perturbation"]
            if not isinstance(p, dict):
                raise ConfigError("perturbation: expected an object")
            a = _complex_list(_field(p, "a", "perturbation"), "perturbation.a")
            b = _complex_list(_field(p, "b", "perturbation"), "perturbation.b")
            c = _complex_list(_field(p, "c", "perturbation"), "perturbation.c")
            if "support" in p and p["support"] != len(b):
                raise ConfigError(f"perturbation.support: {p['support']} does not match len(b) = {len(b)}")
            pert = Perturbation(a=a, b=b, c=c)
        rnd = data.get("random_perturbation")
        if rnd is not None:
            if pert is not None:
                raise ConfigError("config: give either 'perturbation' or 'random_perturbation', not both")
            if not isinstance(rnd, dict):
                raise ConfigError("random_perturbation: expected an object")
            _field(rnd, "support", "random_perturbation")
            _field(rnd, "scale", "random_perturbation")
        return cls(borg=borg, shift=shift, perturbation=pert, random=rnd, raw=data)

    def to_dict(self) -> dict:
        out = dict(self.raw)
        if "bands" not in out:
            out["borg"] = {"s": self.borg.s, "d": self.borg.d, "nu": self.borg.nu, "eps": self.borg.eps}
        if self.perturbation is not None:
            out["perturbation"] = self.perturbation.to_dict()
        return out

    def resolve_perturbation(self, bg, seed):
        if self.perturbation is not None:
            return self.perturbation
        if self.random is not None:
            rng = np.random.default_rng(seed)
            return random_perturbation(
                bg, int(self.random["support"]), float(self.random["scale"]), rng, bool(self.random.get("real", False))
            )
        return Perturbation.zero(bg, 0)

    def lambdas(self):
        """Spectral parameters in normal-form coordinates."""
        if "lambda" in self.raw:
            vals = [parse_complex(self.raw["lambda"], "lambda")]
        elif "lambdas" in self.raw:
            vals = _complex_list(self.raw["lambdas"], "lambdas")
        else:
            raise ConfigError("config: missing field 'lambda' (or 'lambdas')")
        return [z - self.shift for z in vals]

    def block(self, name, required=False):
        blk = self.raw.get(name, None)
        if blk is None:
            if required:
                raise ConfigError(f"config: missing block '{name}'")
            return {}
        if not isinstance(blk, dict):
            raise ConfigError(f"{name}: expected an object")
        return blk


def load_config(path) -> JobConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return JobConfig.from_dict(data)


# --------------------------------------------------------------- commands


def _unshift(z, cfg):
    return complex(z) + cfg.shift


def cmd_reconstruct(cfg: JobConfig, args):
    bg = reconstruct(cfg.borg)
    out = bg.as_dict()
    if cfg.shift:
        out["shift"] = cfg.shift
    return out


def _eval_dict(cfg, bg, lam, n_max):
    ev = evaluate(cfg.borg, bg, lam)
    out = {k: (None if v is POLE else v) for k, v in ev.__dict__.items()}
    out["lam"] = _unshift(lam, cfg)
    out["poles"] = [k for k, v in ev.__dict__.items() if v is POLE]
    out["psi"] = [weyl_solution(cfg.borg, bg, lam, n) for n in range(n_max + 1)]
    return out


def cmd_eval(cfg: JobConfig, args):
    bg = reconstruct(cfg.borg)
    n_max = int(cfg.block("eval").get("n_max", 4))
    return {"background": bg.as_dict(), "points": [_eval_dict(cfg, bg, lam, n_max) for lam in cfg.lambdas()]}


def cmd_jost(cfg: JobConfig, args):
    bg = reconstruct(cfg.borg)
    pert = cfg.resolve_perturbation(bg, args.seed)
    opts = cfg.block("jost")
    solver = opts.get("solver", "backsub")
    if solver not in ("backsub", "series"):
        raise ConfigError(f"jost.solver: expected 'backsub' or 'series', got {solver!r}")
    points = []
    for lam in cfg.lambdas():
        if solver == "series":
            sol = solve_series(pert, cfg.borg, bg, lam, tol=float(opts.get("tol", 1e-12)), j_max=int(opts.get("j_max", 200)))
        else:
            sol = solve_backsub(pert, cfg.borg, bg, lam)
        points.append(
            {
                "lam": _unshift(lam, cfg),
                "jost_function": sol.jost_function,
                "v": sol.v,
                "V": sol.V,
                "recurrence_residual": sol.recurrence_residual,
                "series_terms_used": sol.series_terms_used,
            }
        )
    return {"solver": solver, "perturbation": pert.to_dict(), "points": points}


def _total0(cfg, bg, seed):
    if "total0" in cfg.raw:
        return _number(cfg.raw["total0"], "total0")
    return moments(cfg.resolve_perturbation(bg, seed), bg).total0


def cmd_region_scan(cfg: JobConfig, args):
    bg = reconstruct(cfg.borg)
    g = cfg.block("grid", required=True)
    rect = Rect(
        _number(_field(g, "re_min", "grid"), "grid.re_min") - cfg.shift,
        _number(_field(g, "re_max", "grid"), "grid.re_max") - cfg.shift,
        _number(_field(g, "im_min", "grid"), "grid.im_min"),
        _number(_field(g, "im_max", "grid"), "grid.im_max"),
    )
    nx, ny = int(_field(g, "nx", "grid")), int(_field(g, "ny", "grid"))
    total0 = _total0(cfg, bg, args.seed)
    report = scan(cfg.borg, constants(cfg.borg), total0, rect, nx, ny, threads=args.threads)
    if cfg.shift:
        report = type(report)(
            rect=report.rect,
            nx=nx,
            ny=ny,
            total0=report.total0,
            samples=[type(smp)(lam=_unshift(smp.lam, cfg), abs_w=smp.abs_w, lhs=smp.lhs, in_G=smp.in_G) for smp in report.samples],
        )
    return region_csv(report)


def cmd_check_empty(cfg: JobConfig, args):
    bg = reconstruct(cfg.borg)
    params = constants(cfg.borg)
    if "total1" in cfg.raw:
        total1 = _number(cfg.raw["total1"], "total1")
    else:
        total1 = moments(cfg.resolve_perturbation(bg, args.seed), bg).total1
    return {
        "empty_guaranteed": criterion_first_moment_empty(cfg.borg, params, total1),
        "lhs": first_moment_lhs(cfg.borg, params, total1),
        "t": params.t,
        "total1": total1,
    }


def _contour(spec, cfg, where):
    if "circle" in spec:
        c = spec["circle"]
        return Circle(parse_complex(_field(c, "center", where), where + ".center") - cfg.shift, _number(_field(c, "radius", where), where + ".radius"))
    if "rect" in spec:
        r = spec["rect"]
        return Rect(r["re_min"] - cfg.shift, r["re_max"] - cfg.shift, r["im_min"], r["im_max"])
    raise ConfigError(f"{where}: expected a 'circle' or 'rect' contour")


def cmd_oracle_eigs(cfg: JobConfig, args):
    bg = reconstruct(cfg.borg)
    pert = cfg.resolve_perturbation(bg, args.seed)
    opts = cfg.block("oracle")
    res = truncated_eigs(
        pert,
        cfg.borg,
        bg,
        truncation=int(opts.get("truncation", 200)),
        delta=opts.get("delta"),
        stab_tol=float(opts.get("stab_tol", 1e-6)),
    )
    out = res.as_dict()
    for key in ("eigenvalues", "filtered"):
        out[key] = [_unshift(z, cfg) for z in out[key]]
    counts = []
    for i, spec in enumerate(opts.get("contours", [])):
        wr = winding(pert, cfg.borg, bg, _contour(spec, cfg, f"oracle.contours[{i}]"), n_samples=int(opts.get("n_samples", 128)))
        counts.append({"contour": spec, "zeros_inside": wr.zeros_inside, "min_modulus_on_contour": wr.min_modulus_on_contour})
    out["windings"] = counts
    out["perturbation"] = pert.to_dict()
    return out


def cmd_verify(cfg: JobConfig | None, args):
    opts = cfg.block("verify") if cfg is not None else {}
    n_cases = int(opts.get("n_cases", 100))
    report = run_invariant_suite(seed=args.seed, n_cases=n_cases, threads=args.threads, only=opts.get("only"))
    return report.to_dict()


COMMANDS = {
    "reconstruct": cmd_reconstruct,
    "eval": cmd_eval,
    "jost": cmd_jost,
    "region-scan": cmd_region_scan,
    "check-empty": cmd_check_empty,
    "oracle-eigs": cmd_oracle_eigs,
    "verify": cmd_verify,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="jacobi-spectra", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=name != "verify", help="JSON job file")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--seed", type=int, default=0, help="seed for random perturbations and the suite")
        p.add_argument("--threads", type=int, default=1)
    return parser


def _out_path(out):
    if out is None:
        return None
    base = os.environ.get(OUT_DIR_ENV)
    if base and not os.path.isabs(out):
        return os.path.join(base, out)
    return out


def _write(text, out):
    path = _out_path(out)
    if path is None:
        sys.stdout.write(text)
        return
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else None
        result = COMMANDS[args.command](cfg, args)
    except (ValidationError, PoleProximityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, ContourError, ArithmeticError, JacobiSpectraError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = result if isinstance(result, str) else dumps(result) + "\n"
    _write(text, args.out)
    if args.command == "verify" and not result["passed"]:
        failed = ", ".join(r["id"] for r in result["results"] if r["status"] != "pass")
        print(f"invariant violation: {failed}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
