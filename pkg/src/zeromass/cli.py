"""Command-line entry point: ``zeromass <subcommand> [flags]``.

Exit codes: 0 all checks pass, 1 usage or configuration error, 2 a
verification failed.

Config file schema (JSON object, every key optional)::

    {
      "grid": {"n": 32, "box": 6.283185307179586, "c": 1.0, "dt": 0.05, "steps": 100},
      "seed": 1,
      "band": 4,
      "tolerances": {"duality_diff": 1e-10, "norm_drift": 1e-12, ...},
      "c_overrides": {"SIGMA+RS_SPINOR": 1.01},
      "formulations": ["SIGMA+RS_SPINOR", "SIGMA_TILDE+MO", "ALPHA_STANDARD+SK"],
      "constraint_formulation": "SIGMA+RS_SPINOR",
      "out": "zeromass-out",
      "plot": false,
      "parallel": 1,
      "corrupt_fixture": null
    }

Tolerances apply to numeric checks only; symbolic checks are exact.
``corrupt_fixture`` names a representation whose first matrix is
perturbed before certification (test mode for the failure path).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from . import __version__
from .exact import ExactMatrix
from .field_maps import fields_to_wavefunction, wavefunction_to_fields
from .harness import (
    FORMULATIONS,
    Report,
    Tolerances,
    make_initial_em,
    run_constraint_monitor,
    run_duality,
    run_generalized_maxwell,
    run_neutrino_consistency,
)
from .io import write_json, write_plot_script, write_series_csv, write_snapshot_binary, write_snapshot_csv
from .pdes import CLAIMS, constraint_claims, convention_search, sk_sign_search
from .representations import REPRESENTATIONS, algebra_certificates, build_rep
from .solver import GridSpec, SpectralPropagator

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
SUITES = ("duality", "neutrino", "constraints", "generalized")


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    seed: int = 1
    band: int = 4
    tolerances: Tolerances = field(default_factory=Tolerances)
    c_overrides: dict = field(default_factory=dict)
    formulations: list = field(default_factory=lambda: list(FORMULATIONS))
    constraint_formulation: str = "SIGMA+RS_SPINOR"
    out: str = "zeromass-out"
    plot: bool = False
    parallel: int = 1
    corrupt_fixture: str | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kw = dict(raw)
        try:
            if "grid" in kw:
                kw["grid"] = GridSpec(**kw["grid"])
            if "tolerances" in kw:
                kw["tolerances"] = Tolerances(**kw["tolerances"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        cfg = cls(**kw)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def validate(self):
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        if not 1 <= self.band < self.grid.n // 2:
            raise ConfigError(f"band must satisfy 1 <= band < n/2 = {self.grid.n // 2}")
        if self.parallel < 1:
            raise ConfigError("parallel must be >= 1")
        bad = [n for n in list(self.c_overrides) + list(self.formulations) + [self.constraint_formulation]
               if n not in FORMULATIONS]
        if bad:
            raise ConfigError(f"unknown formulations {bad}; expected names from {list(FORMULATIONS)}")
        if any(not (isinstance(v, (int, float)) and v > 0) for v in self.c_overrides.values()):
            raise ConfigError("c_overrides values must be positive numbers")
        if self.corrupt_fixture is not None and self.corrupt_fixture not in REPRESENTATIONS:
            raise ConfigError(f"corrupt_fixture must be one of {REPRESENTATIONS}")

    def to_dict(self) -> dict:
        return asdict(self)


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    grid_kw = {}
    for flag, key in (("grid", "n"), ("steps", "steps"), ("dt", "dt")):
        if getattr(args, flag, None) is not None:
            grid_kw[key] = getattr(args, flag)
    try:
        if grid_kw:
            cfg.grid = replace(cfg.grid, **grid_kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if args.parallel is not None:
        cfg.parallel = args.parallel
    if args.plot:
        cfg.plot = True
    cfg.validate()
    return cfg


def _envelope(command: str, cfg: RunConfig, passed: bool, body: dict) -> dict:
    return {"tool": "zeromass", "tool_version": __version__, "command": command,
            "verdict": "pass" if passed else "fail", "config": cfg.to_dict(), **body}


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _corrupted(name: str):
    rep = build_rep(name)
    first = rep.spatial[0]
    bumped = first + ExactMatrix([[1 if (i, j) == (0, 0) else 0 for j in range(rep.dim)] for i in range(rep.dim)])
    return replace(rep, spatial=(bumped,) + tuple(rep.spatial[1:]))


def cmd_verify_algebra(cfg: RunConfig) -> int:
    overrides = {cfg.corrupt_fixture: _corrupted(cfg.corrupt_fixture)} if cfg.corrupt_fixture else None
    certs = algebra_certificates(overrides)
    checks = [c for cert in certs for c in cert.checks]
    failed = [f"{cert.name}: {c.name}" for cert in certs for c in cert.checks if not c.passed]
    body = {
        "identities_checked": len(checks),
        "identities_passed": len(checks) - len(failed),
        "failed": failed,
        "certificates": [c.to_dict() for c in certs],
    }
    path = write_json(_outdir(cfg) / "report.json", _envelope("verify-algebra", cfg, not failed, body))
    print(f"verify-algebra: {body['identities_passed']}/{len(checks)} identities hold exactly ({path})")
    for f in failed:
        print(f"FAILED {f}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_verify_equivalence(cfg: RunConfig) -> int:
    searches = [convention_search(c) for c in CLAIMS]
    sk = sk_sign_search()
    constraints = constraint_claims()
    confirmed = sum(s.confirmed for s in searches)
    constraints_ok = all(v["contains_divergences"] for v in constraints.values())
    passed = confirmed == len(searches) and constraints_ok
    body = {
        "claims_confirmed": confirmed,
        "claims_total": len(searches),
        "claims": [s.to_dict() for s in searches],
        "sk_sign_search": sk,
        "constraint_subsystems": constraints,
    }
    path = write_json(_outdir(cfg) / "report.json", _envelope("verify-equivalence", cfg, passed, body))
    for s in searches:
        w = s.winner
        as_printed = "as printed" if s.as_printed.verdict.equal else "not as printed"
        how = "-" if w is None else (f"sign {w.evolution_sign:+d}"
                                     + ("" if w.convention is None else f", {w.convention.describe()}"))
        print(f"{'CONFIRMED' if s.confirmed else 'REFUTED  '} {s.claim.name} [{as_printed}; {how}]")
    print(f"SK sign search: {len(sk['passing_sign_patterns'])} passing pattern(s) of {sk['tried']}")
    for name, v in constraints.items():
        print(f"{'CONFIRMED' if v['contains_divergences'] else 'REFUTED  '} constraint subsystem {name}"
              " contains div E = 0, div B = 0")
    print(f"verify-equivalence: {confirmed}/{len(searches)} claims confirmed ({path})")
    return EXIT_OK if passed else EXIT_FAIL


def _run_suite(suite: str, cfg: RunConfig) -> Report:
    g, s, b, tol = cfg.grid, cfg.seed, cfg.band, cfg.tolerances
    if suite == "duality":
        return run_duality(g, s, cfg.formulations, b, cfg.c_overrides, tol)
    if suite == "neutrino":
        return run_neutrino_consistency(g, s, b, tol)
    if suite == "constraints":
        return run_constraint_monitor(g, s, cfg.constraint_formulation, b, tol)
    return run_generalized_maxwell(g, s, b, tol)


def cmd_run(suite: str, cfg: RunConfig) -> int:
    suites = list(SUITES) if suite == "all" else [suite]
    out = _outdir(cfg)
    t0 = time.perf_counter()
    if cfg.parallel > 1 and len(suites) > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallel) as pool:
            reports = list(pool.map(_run_suite, suites, [cfg] * len(suites)))
    else:
        reports = [_run_suite(name, cfg) for name in suites]
    elapsed = time.perf_counter() - t0
    for rep in reports:
        cols, table = rep.series_table()
        csv_path = write_series_csv(out / f"{rep.suite}.csv", cols, table)
        if cfg.plot:
            write_plot_script(out / f"plot_{rep.suite}.py", csv_path.name, f"{rep.suite} time series")
        for c in rep.checks:
            print(f"{'PASS' if c.passed else 'FAIL'} [{rep.suite}] {c.name}: {c.value:.3e} (tol {c.tolerance:g})")
    passed = all(r.verdict for r in reports)
    body = {"suites": {r.suite: r.to_dict() for r in reports}, "elapsed_seconds": elapsed}
    path = write_json(out / "report.json", _envelope(f"run {suite}", cfg, passed, body))
    print(f"run {suite}: {'pass' if passed else 'fail'} in {elapsed:.1f}s ({path})")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_export(cfg: RunConfig, formulation: str, t: float, fmt: str) -> int:
    if formulation not in FORMULATIONS:
        raise ConfigError(f"unknown formulation {formulation!r}")
    form = FORMULATIONS[formulation]
    rep, pack, recon = form.build()
    state0 = make_initial_em(cfg.grid, cfg.seed, cfg.band)
    psi = SpectralPropagator(rep, cfg.grid).evolve(fields_to_wavefunction(pack, state0), t)
    state = wavefunction_to_fields(recon, psi)
    out = _outdir(cfg)
    stem = f"{formulation.replace('+', '_')}_t{t:g}"
    written = []
    if fmt in ("binary", "both"):
        written += [write_snapshot_binary(out / f"{stem}_fields.zmdw", state),
                    write_snapshot_binary(out / f"{stem}_psi.zmdw", psi)]
    if fmt in ("csv", "both"):
        written += [write_snapshot_csv(out / f"{stem}_fields.csv", state),
                    write_snapshot_csv(out / f"{stem}_psi.csv", psi)]
    body = {"formulation": formulation, "time": t, "files": [str(p) for p in written]}
    write_json(out / "report.json", _envelope("export", cfg, True, body))
    for p in written:
        print(p)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file; flags override its values")
    common.add_argument("--out", metavar="DIR", help="output directory (default zeromass-out)")
    common.add_argument("--seed", type=int, metavar="N")
    common.add_argument("--grid", type=int, metavar="N", help="points per axis")
    common.add_argument("--steps", type=int, metavar="N", help="snapshot count")
    common.add_argument("--dt", type=float, metavar="X", help="snapshot interval")
    common.add_argument("--parallel", type=int, metavar="K", help="run independent suites in K processes")
    common.add_argument("--plot", action="store_true", help="emit matplotlib scripts for the CSV series")

    parser = _Parser(prog="zeromass", description="Verify and simulate zero-mass wave equations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("verify-algebra", parents=[common], help="exact representation certificates")
    sub.add_parser("verify-equivalence", parents=[common], help="symbolic equivalence matrix")
    run = sub.add_parser("run", parents=[common], help="numerical suites")
    run.add_argument("suite", choices=SUITES + ("all",))
    exp = sub.add_parser("export", parents=[common], help="snapshot dumps")
    exp.add_argument("--formulation", default="SIGMA+RS_SPINOR", choices=list(FORMULATIONS))
    exp.add_argument("--time", type=float, default=0.0, help="evolution time of the snapshot")
    exp.add_argument("--format", choices=("binary", "csv", "both"), default="binary")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if args.command == "verify-algebra":
            return cmd_verify_algebra(cfg)
        if args.command == "verify-equivalence":
            return cmd_verify_equivalence(cfg)
        if args.command == "run":
            return cmd_run(args.suite, cfg)
        return cmd_export(cfg, args.formulation, args.time, args.format)
    except ConfigError as exc:
        print(f"zeromass: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
