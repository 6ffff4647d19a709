"""Config-driven experiment runner.

Subcommands
-----------
constants   closed-form asymptotic constants for the configured model
exact-scan  exact tail-ratio scans of S_n from the transform pipeline
mc-scan     Monte Carlo large-deviation ratio scans (upper or lower tail)
compare     exact brackets vs Monte Carlo estimates, with z-scores
verify      per-module invariant suites

Every run writes ``results.csv`` (schema fixed per subcommand, see
``--help``) and ``report.json`` into the output directory.  All floats are
rendered with shortest round-trip formatting, so outputs are byte-for-byte
reproducible given (config, seed) except for the timestamp and wall-clock
fields of the report.

Config files are flat ``key = value`` lines under ``[model]`` and
``[experiment]`` section headers; command-line flags mirror the keys and
override file values.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import asymptotics as asy
from . import exact, montecarlo, verify as verify_mod
from .laws import parse_law
from .params import ModelParams
from .pmf import Pmf

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ASSERTION = 2

_KINDS = ("constants", "exact-scan", "mc-scan", "compare", "verify")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    offspring: str = ""
    immigration: str = ""
    tag: str = ""
    p: float | None = None
    kind: str = ""
    n: tuple = ()
    x: tuple = ()
    x_multipliers: tuple = ()
    threshold_delta: float | None = None
    cutoff: int = 4096
    tol: float = 1e-10
    budget: int = 100_000
    seed: int = 1
    method: str = "plain"
    direction: str = "upper"
    suite: str = "ALL"
    out: str = "bpilab-out"
    assert_max_abs_z: float = 4.0

    def params(self) -> ModelParams:
        if not self.offspring or not self.immigration:
            raise ConfigError("model needs both 'offspring' and 'immigration' laws")
        return ModelParams.make(
            parse_law(self.offspring),
            parse_law(self.immigration),
            model_tag=self.tag or None,
            p=self.p,
        )


_MODEL_KEYS = {"offspring": str, "immigration": str, "tag": str, "p": float}
_EXPERIMENT_KEYS = {
    "kind": str,
    "n": "int_list",
    "x": "float_list",
    "x_multipliers": "float_list",
    "threshold_delta": float,
    "cutoff": int,
    "tol": float,
    "budget": int,
    "seed": int,
    "method": str,
    "direction": str,
    "suite": str,
    "out": str,
    "assert_max_abs_z": float,
}


def _convert(key, spec, raw, line_no):
    if not raw:
        raise ConfigError(f"line {line_no}: empty value for key {key!r}")
    try:
        if spec == "int_list":
            return tuple(int(v) for v in raw.split(",") if v.strip())
        if spec == "float_list":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        return spec(raw)
    except ValueError:
        raise ConfigError(f"line {line_no}: bad value {raw!r} for key {key!r}") from None


def parse_config(text: str) -> ExperimentConfig:
    cfg = ExperimentConfig()
    section = None
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            if section not in ("model", "experiment"):
                raise ConfigError(f"line {line_no}: unknown section [{section}]")
            continue
        if "=" not in stripped:
            col = line.index(stripped[0]) + 1
            raise ConfigError(f"line {line_no}, column {col}: expected key = value, got {stripped!r}")
        if section is None:
            raise ConfigError(f"line {line_no}: key outside any [section]")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        table = _MODEL_KEYS if section == "model" else _EXPERIMENT_KEYS
        if key not in table:
            raise ConfigError(f"line {line_no}: unknown key {key!r} in [{section}]")
        setattr(cfg, key, _convert(key, table[key], raw, line_no))
    if cfg.kind and cfg.kind not in _KINDS:
        raise ConfigError(f"unknown experiment kind {cfg.kind!r}")
    return cfg


def serialize_config(cfg: ExperimentConfig) -> str:
    """Canonical config text; parse(serialize(parse(s))) == parse(s)."""
    lines = ["[model]"]
    for key in _MODEL_KEYS:
        val = getattr(cfg, key)
        if val not in ("", None):
            lines.append(f"{key} = {_render(val)}")
    lines.append("")
    lines.append("[experiment]")
    for key in _EXPERIMENT_KEYS:
        val = getattr(cfg, key)
        if val in ("", None, ()):
            continue
        lines.append(f"{key} = {_render(val)}")
    return "\n".join(lines) + "\n"


def _render(val) -> str:
    if isinstance(val, tuple):
        return ",".join(_render(v) for v in val)
    if isinstance(val, float):
        return repr(val)
    return str(val)


# ---------------------------------------------------------------------------
# experiment drivers


def _x_grid(cfg: ExperimentConfig, params, n: int):
    if cfg.x:
        return [float(v) for v in cfg.x]
    if cfg.x_multipliers:
        if cfg.threshold_delta is None:
            raise ConfigError("x_multipliers needs threshold_delta")
        spec = asy.ThresholdSpec(params.kappa, cfg.threshold_delta)
        xn = asy.threshold(spec, n)
        return [m * xn for m in cfg.x_multipliers]
    raise ConfigError("experiment needs an 'x' grid or 'x_multipliers'")


def _run_constants(cfg: ExperimentConfig, outdir: Path, report: dict) -> int:
    params = cfg.params()
    rows = []
    consts = []
    if params.heavy:
        consts.append(asy.const_stationary(params))
        consts.append(asy.const_ld(params))
        consts.append(asy.const_sinf(params))
        for n in cfg.n:
            consts.append(asy.const_Sn_fixed(params, n))
        if params.model_tag == "B":
            consts.append(asy.const_underlying(params.alpha, params.kappa, "T"))
            for n in cfg.n:
                consts.append(asy.const_underlying(params.alpha, params.kappa, "Zn", n))
                consts.append(asy.const_underlying(params.alpha, params.kappa, "Tn", n))
    for c in consts:
        rows.append(f"{c.name},{c.value!r},{c.provenance}")
    (outdir / "results.csv").write_text("name,value,provenance\n" + "".join(r + "\n" for r in rows))
    report["constants"] = [
        {"name": c.name, "value": c.value, "provenance": c.provenance} for c in consts
    ]
    return EXIT_OK


def _run_exact_scan(cfg: ExperimentConfig, outdir: Path, report: dict) -> int:
    params = cfg.params()
    if not cfg.n:
        raise ConfigError("exact-scan needs an 'n' list")
    c_ld = asy.const_ld(params).value if params.heavy else math.nan
    lines = []
    for n in cfg.n:
        pmf = exact.pmf_Sn(params, n, cfg.cutoff)
        d_n = asy.centering(params, n)
        c_fix = asy.const_Sn_fixed(params, n).value if params.heavy else math.nan
        for x in _x_grid(cfg, params, n):
            lo, hi = pmf.tail_of(x)
            clo, chi = pmf.tail_of(x + d_n)
            den = params.driver.tail(x)
            lines.append(
                ",".join(
                    [
                        params.model_tag,
                        str(n),
                        repr(x),
                        repr(lo),
                        repr(hi),
                        repr(hi / den),
                        repr(c_fix),
                        repr(chi / (n * den)),
                        repr(c_ld),
                    ]
                )
            )
    header = "model,n,x,prob_lo,prob_hi,fixed_ratio,const_sn_fixed,ld_ratio,const_ld"
    (outdir / "results.csv").write_text(header + "\n" + "".join(r + "\n" for r in lines))
    report["rows"] = len(lines)
    return EXIT_OK


def _run_mc_scan(cfg: ExperimentConfig, outdir: Path, report: dict) -> int:
    params = cfg.params()
    if not cfg.n:
        raise ConfigError("mc-scan needs an 'n' list")
    if cfg.direction == "upper":
        spec = None
        if cfg.x_multipliers:
            if cfg.threshold_delta is None:
                raise ConfigError("x_multipliers needs threshold_delta")
            spec = asy.ThresholdSpec(params.kappa, cfg.threshold_delta)
        rows = montecarlo.ld_ratio_scan(
            params,
            cfg.n,
            cfg.budget,
            cfg.seed,
            method=cfg.method,
            spec=spec,
            multipliers=cfg.x_multipliers or (1.0,),
            x_values=cfg.x or None,
        )
    elif cfg.direction == "lower":
        xs = cfg.x or tuple(_x_grid(cfg, params, n)[0] for n in cfg.n)
        rows = montecarlo.lower_deviation_scan(params, cfg.n, xs, cfg.budget, cfg.seed)
    else:
        raise ConfigError(f"unknown direction {cfg.direction!r}")
    montecarlo.write_scan_csv(rows, outdir / "results.csv")
    report["rows"] = len(rows)
    return EXIT_OK


def _run_compare(cfg: ExperimentConfig, outdir: Path, report: dict) -> int:
    params = cfg.params()
    if not cfg.n:
        raise ConfigError("compare needs an 'n' list")
    lines = []
    max_abs_z = 0.0
    for n in cfg.n:
        pmf = exact.pmf_Sn(params, n, cfg.cutoff)
        d_n = asy.centering(params, n)
        for x in _x_grid(cfg, params, n):
            est = montecarlo.estimate_tail(params, n, x, cfg.budget, cfg.seed, cfg.method)
            lo, hi = pmf.tail_of(x + d_n)
            if est.value > hi:
                z = (est.value - hi) / max(est.stderr, 1e-300)
            elif est.value < lo:
                z = (lo - est.value) / max(est.stderr, 1e-300)
            else:
                z = 0.0
            max_abs_z = max(max_abs_z, z)
            lines.append(
                ",".join(
                    [
                        params.model_tag,
                        str(n),
                        repr(x),
                        cfg.method,
                        repr(est.value),
                        repr(est.stderr),
                        repr(lo),
                        repr(hi),
                        repr(z),
                    ]
                )
            )
    header = "model,n,x,method,estimate,stderr,exact_lo,exact_hi,abs_z"
    (outdir / "results.csv").write_text(header + "\n" + "".join(r + "\n" for r in lines))
    report["max_abs_z"] = max_abs_z
    report["assert_max_abs_z"] = cfg.assert_max_abs_z
    return EXIT_OK if max_abs_z < cfg.assert_max_abs_z else EXIT_ASSERTION


def _run_verify(cfg: ExperimentConfig, outdir: Path, report: dict) -> int:
    results = verify_mod.run_suite(cfg.suite)
    lines = []
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{r.suite}] {r.name}: {status}" + (f"  ({r.detail})" if r.detail else ""))
        failed += not r.passed
        detail = r.detail.replace(",", ";")
        lines.append(f"{r.suite},{r.name},{status},{detail}")
    (outdir / "results.csv").write_text(
        "suite,name,status,detail\n" + "".join(r + "\n" for r in lines)
    )
    report["checks"] = len(results)
    report["failed"] = failed
    print(f"verify: {len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_ASSERTION


_RUNNERS = {
    "constants": _run_constants,
    "exact-scan": _run_exact_scan,
    "mc-scan": _run_mc_scan,
    "compare": _run_compare,
    "verify": _run_verify,
}


def run(cfg: ExperimentConfig) -> int:
    """Execute one experiment; writes results.csv and report.json."""
    started = time.time()
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    report = {
        "kind": cfg.kind,
        "config": serialize_config(cfg),
        "seed": cfg.seed,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    if cfg.offspring and cfg.immigration:
        params = cfg.params()
        report["params"] = {
            "offspring": params.offspring.to_spec(),
            "immigration": params.immigration.to_spec(),
            "model_tag": params.model_tag,
            "alpha": params.alpha,
            "beta": params.beta,
            "kappa": params.kappa,
            "p": params.p,
            "digest": params.digest(),
        }
    code = _RUNNERS[cfg.kind](cfg, outdir, report)
    report["exit_code"] = code
    report["wall_clock_seconds"] = time.time() - started
    with open(outdir / "report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return code


# ---------------------------------------------------------------------------
# argument parsing

_CSV_DOC = """CSV schemas per subcommand:
  constants : name,value,provenance
  exact-scan: model,n,x,prob_lo,prob_hi,fixed_ratio,const_sn_fixed,ld_ratio,const_ld
              (fixed_ratio = P(S_n > x)/P(driver > x) against const_sn_fixed;
               ld_ratio = P(S_n - d_n > x)/(n P(driver > x)) against const_ld;
               prob_* are the certified brackets for P(S_n > x))
  mc-scan   : model,n,x,method,estimate,stderr,ci_lo,ci_hi,theory_denominator,ratio,const_ld
  compare   : model,n,x,method,estimate,stderr,exact_lo,exact_hi,abs_z
  verify    : suite,name,status,detail
Exit codes: 0 success, 1 error, 2 assertion failure."""


def _add_common(sub):
    sub.add_argument("--config", help="config file (flat key=value with [sections])")
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--seed", type=int, help="64-bit stream seed")
    sub.add_argument("--offspring", help="offspring law, e.g. 'bernoulli(q=0.5)'")
    sub.add_argument("--immigration", help="immigration law, e.g. 'pareto(kappa=2)'")
    sub.add_argument("--tag", choices=("A", "B"), help="model tag (auto-detected by default)")
    sub.add_argument("--p", type=float, help="tail-comparability constant (model B)")
    sub.add_argument("--n", help="comma-separated generation counts")
    sub.add_argument("--x", help="comma-separated absolute x grid")
    sub.add_argument("--x-multipliers", dest="x_multipliers", help="multipliers of x_n")
    sub.add_argument("--threshold-delta", dest="threshold_delta", type=float,
                     help="delta (kappa<=2) or a (kappa>2) in the x_n rule")
    sub.add_argument("--cutoff", type=int, help="pmf window cutoff N")
    sub.add_argument("--tol", type=float, help="stationary/total-progeny tolerance")
    sub.add_argument("--budget", type=int, help="Monte Carlo sample budget")
    sub.add_argument("--method", choices=("plain", "bigjump"), help="MC estimator")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bpilab",
        description="Exact and Monte Carlo tail numerics for branching processes with immigration.",
        epilog=_CSV_DOC,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subs = parser.add_subparsers(dest="kind", required=True)
    for kind in _KINDS:
        sub = subs.add_parser(kind, epilog=_CSV_DOC,
                              formatter_class=argparse.RawDescriptionHelpFormatter)
        _add_common(sub)
        if kind == "mc-scan":
            sub.add_argument("--direction", choices=("upper", "lower"))
        if kind == "compare":
            sub.add_argument("--assert-max-abs-z", dest="assert_max_abs_z", type=float)
        if kind == "verify":
            sub.add_argument("--suite", help="regvar|process|exact|asymptotics|montecarlo|ALL")
    return parser


def _merge_args(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    cfg.kind = args.kind
    for key in ("out", "seed", "offspring", "immigration", "tag", "p", "threshold_delta",
                "cutoff", "tol", "budget", "method", "direction", "suite", "assert_max_abs_z"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "n", None):
        cfg.n = tuple(int(v) for v in args.n.split(","))
    if getattr(args, "x", None):
        cfg.x = tuple(float(v) for v in args.x.split(","))
    if getattr(args, "x_multipliers", None):
        cfg.x_multipliers = tuple(float(v) for v in args.x_multipliers.split(","))
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = parse_config(Path(args.config).read_text())
        else:
            cfg = ExperimentConfig()
        cfg = _merge_args(cfg, args)
        return run(cfg)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except exact.ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
