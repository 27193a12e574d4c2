"""Command-line front end.

Subcommands::

    memchan dynamics --tau T --mu M --nu-max X --steps N --out FILE
    memchan blp      --tau T --mu M --samples K --seed S --out FILE
    memchan ent      --tau T --mu M --samples K --seed S --out FILE
    memchan sweep    --measure {blp|ent} --tau T --mu-grid a:b:step --samples K --seed S --out FILE
    memchan verify   --seed S --out FILE

Series go to headered CSV, summaries to JSON. Any option may also come from a
``--config`` file of ``key = value`` lines; command-line flags win.

Exit codes: 0 success, 2 configuration error, 3 failed numerical check, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import channels as ch
from . import linalg
from . import measures as ms
from . import states as st
from .errors import ConfigError

log = logging.getLogger("memchan")

EXIT_OK, EXIT_CONFIG, EXIT_CHECK, EXIT_IO = 0, 2, 3, 4

DYNAMICS_HEADER = ["nu", "phi", "gamma", "trace_distance_optpair", "concurrence_bell"]
SWEEP_HEADER = ["mu", "measure", "value", "argmax_descriptor"]

ENT_FAMILIES = ("lu", "bell", "all")
BLP_FAMILIES = ("library", "optimal")


@dataclass
class RunConfig:
    command: str
    tau: float = 1.0
    mu: float = 0.5
    mu_grid: list = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    nu_max: float = 40.0
    steps: int = 20000
    seed: int = 42
    samples: int = 500
    measure: str = "blp"
    family: str | None = None
    out: str | None = None
    summary: str | None = None
    refine: bool = True

    def validate(self) -> "RunConfig":
        if not (np.isfinite(self.tau) and self.tau > 0):
            raise ConfigError("tau", f"must be > 0, got {self.tau}")
        if not 0.0 <= self.mu <= 1.0:
            raise ConfigError("mu", f"must lie in [0, 1], got {self.mu}")
        if not self.mu_grid:
            raise ConfigError("mu_grid", "is empty")
        bad = [m for m in self.mu_grid if not 0.0 <= m <= 1.0]
        if bad:
            raise ConfigError("mu_grid", f"values outside [0, 1]: {bad}")
        if not self.nu_max > 0:
            raise ConfigError("nu_max", f"must be > 0, got {self.nu_max}")
        if self.steps < 2:
            raise ConfigError("steps", f"must be >= 2, got {self.steps}")
        if self.samples < 1:
            raise ConfigError("samples", f"must be >= 1, got {self.samples}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", f"must be a 64-bit unsigned integer, got {self.seed}")
        if self.measure not in ms.MEASURES:
            raise ConfigError("measure", f"must be one of {ms.MEASURES}, got {self.measure!r}")
        families = BLP_FAMILIES if self._measure_kind() == "blp" else ENT_FAMILIES
        if self.family is not None and self.family not in families:
            raise ConfigError("family", f"must be one of {families}, got {self.family!r}")
        return self

    def _measure_kind(self) -> str:
        if self.command in ("blp", "ent"):
            return self.command
        return self.measure

    @property
    def params(self) -> ch.DephasingParams:
        return ch.DephasingParams(self.tau)

    @property
    def grid(self) -> ms.TimeGrid:
        return ms.TimeGrid(self.nu_max, self.steps)


def parse_mu_grid(text: str) -> list[float]:
    """``a:b:step`` (inclusive of b) or a comma-separated list."""
    text = text.strip()
    if not text:
        return []
    try:
        if ":" in text:
            parts = [float(x) for x in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            a, b, step = parts
            if step <= 0:
                raise ConfigError("mu_grid", f"step must be > 0, got {step}")
            if b < a:
                return []
            n = int(np.floor((b - a) / step + 1e-9)) + 1
            return [round(a + k * step, 12) for k in range(n)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError("mu_grid", f"cannot parse {text!r}; use a:b:step or a,b,c") from None


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _descriptor_text(d: dict) -> str:
    return json.dumps(d, sort_keys=True, separators=(",", ":"))


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _open_csv(path: str):
    fh = open(path, "w", encoding="utf-8", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def cmd_dynamics(cfg: RunConfig) -> int:
    params, grid = cfg.params, cfg.grid
    nus = grid.nus
    f = ch.phi(nus, params)
    g = ch.gamma(nus, params, cfg.mu)
    td = ms.trace_distance_series(*ms.optimal_pair(), params, cfg.mu, grid).values
    cb = ms.concurrence_series(st.bell_state(0), params, cfg.mu, grid).values
    fh, w = _open_csv(cfg.out)
    with fh:
        w.writerow(DYNAMICS_HEADER)
        for row in zip(nus, f, g, td, cb):
            w.writerow([fmt(x) for x in row])
    log.info("wrote %d rows to %s", len(nus), cfg.out)
    return EXIT_OK


def _source(cfg: RunConfig, kind: str) -> list[ms.Candidate]:
    if kind == "blp":
        if cfg.family == "optimal":
            return ms.structured_pairs()[:1]
        return ms.pair_library(cfg.seed, cfg.samples)
    if cfg.family == "bell":
        return ms.lu_orbit_ensemble(cfg.seed, 0)
    cands = ms.lu_orbit_ensemble(cfg.seed, cfg.samples)
    if cfg.family == "all":
        offset = cfg.samples
        for j, kind_ in enumerate(("pure", "mixed_ginibre", "product")):
            for i in range(cfg.samples):
                idx = offset + j * cfg.samples + i
                rho = st.sample_state(kind_, st.RngStream(cfg.seed, idx))
                cands.append(ms.Candidate({"family": kind_, "master_seed": cfg.seed, "stream_index": idx}, rho))
    return cands


def _family_maxima(cands: list[ms.Candidate], values: np.ndarray) -> dict:
    out: dict[str, float] = {}
    for c, v in zip(cands, values):
        fam = c.descriptor.get("family", "unlabelled")
        out[fam] = max(out.get(fam, -np.inf), float(v))
    return out


def _summary_path(cfg: RunConfig) -> str:
    if cfg.summary:
        return cfg.summary
    return str(Path(cfg.out).with_suffix(".json"))


def _single_measure(cfg: RunConfig, kind: str) -> int:
    cands = _source(cfg, kind)
    fn = ms.blp_measure if kind == "blp" else ms.entanglement_measure
    res = fn(cands, cfg.params, cfg.mu, cfg.grid, cfg.refine)
    _write_json(
        cfg.out,
        {
            "measure": kind,
            "tau": cfg.tau,
            "mu": cfg.mu,
            "seed": cfg.seed,
            "samples": cfg.samples,
            "grid": cfg.grid.as_dict(),
            "value": res.value,
            "argmax_descriptor": res.argmax_descriptor,
            "family_maxima": _family_maxima(cands, res.values),
        },
    )
    return EXIT_OK


def cmd_blp(cfg: RunConfig) -> int:
    return _single_measure(cfg, "blp")


def cmd_ent(cfg: RunConfig) -> int:
    return _single_measure(cfg, "ent")


def cmd_sweep(cfg: RunConfig) -> int:
    cands = _source(cfg, cfg.measure)
    results = ms.measure_sweep(cfg.measure, cfg.mu_grid, cands, cfg.params, cfg.grid, cfg.refine)
    fh, w = _open_csv(cfg.out)
    with fh:
        w.writerow(SWEEP_HEADER)
        for mu, res in results:
            w.writerow([fmt(mu), cfg.measure, fmt(res.value), _descriptor_text(res.argmax_descriptor)])
    _write_json(
        _summary_path(cfg),
        {
            "measure": cfg.measure,
            "tau": cfg.tau,
            "seed": cfg.seed,
            "samples": cfg.samples,
            "family": cfg.family,
            "candidates": len(cands),
            "grid": cfg.grid.as_dict(),
            "refine": cfg.refine,
            "results": [
                {
                    "mu": mu,
                    "value": res.value,
                    "argmax_descriptor": res.argmax_descriptor,
                    "family_maxima": _family_maxima(cands, res.values),
                }
                for mu, res in results
            ],
        },
    )
    return EXIT_OK


def _check(name: str, violation: float, tol: float) -> dict:
    return {"check": name, "max_violation": float(violation), "tolerance": tol, "pass": bool(violation <= tol)}


def run_checks(seed: int, tau: float = 1.0) -> list[dict]:
    """Self-test: oracle equivalences and CPTP certification on seeded inputs."""
    params = ch.DephasingParams(tau)
    gen = st.RngStream(seed, 0).generator()
    points = [(float(gen.uniform(0, 5)), float(gen.uniform(0, 1))) for _ in range(20)]
    kinds = ("pure", "mixed_ginibre", "product", "max_entangled_lu")
    rhos = [st.sample_state(kinds[i % 4], st.RngStream(seed, 1 + i)) for i in range(100)]

    kraus_dev = 0.0
    for nu, mu in points:
        spec = ch.dephasing_spec(nu, params, mu)
        for rho in rhos:
            diff = ch.apply_two_qubit(rho, spec) - ch.evolve_closed_form(rho, nu, params, mu)
            kraus_dev = max(kraus_dev, float(np.abs(diff).max()))

    neg, tp = 0.0, 0.0
    for i in range(100):
        g = st.RngStream(seed, 1000 + i).generator()
        rep = ch.certify_cptp(ch.dephasing_spec(float(g.uniform(0, 10)), params, float(g.uniform(0, 1))))
        neg = max(neg, -rep.min_eigenvalue)
        tp = max(tp, rep.trace_preservation_error)

    invalid = 0.0
    for kind in st.STATE_KINDS:
        for i in range(200):
            for v in st.validate(st.sample_state(kind, st.RngStream(seed, 2000 + i))):
                invalid = max(invalid, v.magnitude)

    grid = ms.TimeGrid(10.0, 1000)
    nus = grid.nus
    f = ch.phi(nus, params)
    td_dev = max(
        float(np.abs(ms.trace_distance_series(*ms.optimal_pair(), params, mu, grid).values - np.abs(f)).max())
        for mu in (0.0, 0.5, 1.0)
    )
    bell_dev = max(
        float(np.abs(ms.concurrence_series(st.bell_state(0), params, mu, grid).values - ((1 - mu) * f**2 + mu)).max())
        for mu in (0.0, 0.1, 0.5, 1.0)
    )

    jac_dev = 0.0
    for i in range(50):
        g = st.RngStream(seed, 3000 + i).generator()
        a = st.ginibre(4, g)
        a = a + linalg.dagger(a)
        jac_dev = max(jac_dev, float(np.abs(linalg.hermitian_eigenvalues(a) - linalg.eigvalsh_batch(a)).max()))

    return [
        _check("kraus_vs_closed_form", kraus_dev, 1e-12),
        _check("choi_psd", neg, ch.CPTP_TOL),
        _check("choi_trace_preserving", tp, ch.PROB_TOL),
        _check("sampler_validity", invalid, 0.0),
        _check("optimal_pair_trace_distance", td_dev, 1e-12),
        _check("bell_concurrence_law", bell_dev, 1e-12),
        _check("jacobi_vs_lapack", jac_dev, 1e-10),
    ]


def cmd_verify(cfg: RunConfig) -> int:
    checks = run_checks(cfg.seed, cfg.tau)
    ok = all(c["pass"] for c in checks)
    _write_json(cfg.out, {"seed": cfg.seed, "tau": cfg.tau, "all_pass": ok, "checks": checks})
    for c in checks:
        log.info("%-30s %s  max violation %.3e", c["check"], "PASS" if c["pass"] else "FAIL", c["max_violation"])
    return EXIT_OK if ok else EXIT_CHECK


COMMANDS = {
    "dynamics": cmd_dynamics,
    "blp": cmd_blp,
    "ent": cmd_ent,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memchan",
        description="Correlated random-telegraph dephasing: dynamics and non-Markovianity measures.",
        epilog="Bell index convention: 0=Phi+, 1=Phi-, 2=Psi+, 3=Psi-. Env MEMCHAN_THREADS caps worker threads.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_help):
        p.add_argument("--config", help="file of key = value lines; flags override it")
        p.add_argument("--tau", type=float)
        p.add_argument("--out", help=out_help)
        p.add_argument("--seed", type=int)

    def timegrid(p):
        p.add_argument("--nu-max", type=float, dest="nu_max")
        p.add_argument("--steps", type=int, help="number of grid points on [0, nu-max]")

    p = sub.add_parser("dynamics", help="phi, gamma, optimal-pair trace distance and Bell concurrence vs nu")
    common(p, "CSV output")
    timegrid(p)
    p.add_argument("--mu", type=float)

    for name, fams, what in (("blp", BLP_FAMILIES, "pair"), ("ent", ENT_FAMILIES, "state")):
        p = sub.add_parser(name, help=f"{name} measure at a single mu (JSON)")
        common(p, "JSON output")
        timegrid(p)
        p.add_argument("--mu", type=float)
        p.add_argument("--samples", type=int, help=f"random {what}s in the candidate ensemble")
        p.add_argument("--family", choices=fams)
        p.add_argument("--no-refine", dest="refine", action="store_false", default=None)

    p = sub.add_parser("sweep", help="a measure over a grid of mu values (CSV + JSON summary)")
    common(p, "CSV output")
    timegrid(p)
    p.add_argument("--measure", choices=ms.MEASURES)
    p.add_argument("--mu-grid", dest="mu_grid", help="a:b:step (inclusive) or comma list")
    p.add_argument("--samples", type=int)
    p.add_argument("--family", help=f"blp: {'|'.join(BLP_FAMILIES)}; ent: {'|'.join(ENT_FAMILIES)}")
    p.add_argument("--summary", help="JSON summary path (default: --out with .json suffix)")
    p.add_argument("--no-refine", dest="refine", action="store_false", default=None)

    p = sub.add_parser("verify", help="run the self-consistency checks (JSON report)")
    common(p, "JSON report")
    return parser


_CASTS = {
    "tau": float,
    "mu": float,
    "nu_max": float,
    "steps": int,
    "seed": int,
    "samples": int,
    "measure": str,
    "family": str,
    "out": str,
    "summary": str,
    "mu_grid": parse_mu_grid,
    "refine": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
}


def read_config_file(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError("config", f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _CASTS:
                raise ConfigError(key, f"unknown key in {path}:{lineno}")
            try:
                values[key] = _CASTS[key](value)
            except ValueError:
                raise ConfigError(key, f"cannot parse {value!r}") from None
    return values


def make_config(args: argparse.Namespace) -> RunConfig:
    merged: dict = {}
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    for key in _CASTS:
        value = getattr(args, key, None)
        if value is None:
            continue
        merged[key] = parse_mu_grid(value) if key == "mu_grid" else value
    cfg = RunConfig(command=args.command, **merged)
    if not cfg.out:
        raise ConfigError("out", "an output path is required")
    return cfg.validate()


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = make_config(args)
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"memchan: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"memchan: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
