"""Config-driven experiment runner and command-line interface.

Configs are flat ``key = value`` text ('#' starts a comment, section headers
are ignored, unknown keys are rejected).  Subcommands: ``sweep`` (measured
generalization error plus the bound over a list of R), ``gen`` and ``bound``
(each half separately), ``verify`` (the exact enumeration suite) and
``ingest-csv`` (validate a dataset file).

Exit codes: 0 success, 1 verification failure, 2 config error, 3 runtime
error.  Outputs are byte-reproducible for a fixed config and seed; wall-clock
timings go to stderr and are stored in the table only when FEDGEN_TIMING=1.
"""

from __future__ import annotations

import argparse
import csv as csv_mod
import io
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .bound import theorem_bound
from .core import RunConfig, Schedule
from .distributions import (
    DataDistribution,
    Empirical,
    Finite,
    FiniteDistribution,
    Friedman1,
    GaussianLinear,
    GaussianLocation,
    FRIEDMAN1_DIM,
)
from .errors import (
    FedgenError,
    NoisyRunUnsupportedError,
    ParseError,
    TooFewRowsError,
    ValidationError,
)
from .kernels import BACKEND
from .losses import get_family
from .parallel import resolve_threads
from .report import ResultsTable, SweepRow, emit_csv, emit_json, emit_svg_plot
from .rng import derive_stream
from .risks import MCEstimate, gen_replicate_table, mc_estimate
from .verify import run_suite

DISTS = ("friedman1", "gaussian_location", "gaussian_linear", "finite", "csv")
LOSSES = ("squared_location", "ols_regression")


@dataclass
class ExperimentSpec:
    """Fully resolved experiment description."""

    n: int
    K: int
    R_list: list[int]
    dist: str
    loss: str
    d: int
    eta: float = 0.01
    seed: int = 0
    M: int = 1000
    M_inner: int = 32
    N_test: int = 1000
    sigma_xi: float = 0.0
    w0: float = 0.0
    L: float | None = None
    full_term2: bool = False
    a_prime_r1: str = "trained"
    mean: float = 0.0
    sigma: float = 1.0
    wstar: float = 1.0
    noise_sigma: float = 1.0
    support: list[list[float]] | None = None
    probs: list[float] | None = None
    csv: str | None = None
    out: str | None = None
    svg: str | None = None
    json: str | None = None

    def echo(self) -> dict:
        return asdict(self)


def _parse_bool(key: str, value: str) -> bool:
    v = value.lower()
    if v in ("true", "1", "yes"):
        return True
    if v in ("false", "0", "no"):
        return False
    raise ValidationError(key, f"expected a boolean, got {value!r}")


def _parse_support(value: str) -> list[list[float]]:
    points = []
    for chunk in value.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        points.append([float(c) for c in chunk.split(",")])
    return points


_KEY_PARSERS = {
    "n": int,
    "K": int,
    "d": int,
    "R": lambda v: [int(c) for c in v.split(",")],
    "eta": float,
    "seed": int,
    "dist": str,
    "loss": str,
    "M": int,
    "M_inner": int,
    "N_test": int,
    "sigma_xi": float,
    "w0": float,
    "L": float,
    "full_term2": lambda v: _parse_bool("full_term2", v),
    "a_prime_r1": str,
    "mean": float,
    "sigma": float,
    "wstar": float,
    "noise_sigma": float,
    "support": _parse_support,
    "probs": lambda v: [float(c) for c in v.split(",")],
    "csv": str,
    "out": str,
    "svg": str,
    "json": str,
}

_REQUIRED = ("n", "K", "R", "dist", "loss")

_DEFAULT_D = {"friedman1": FRIEDMAN1_DIM, "gaussian_linear": 10, "gaussian_location": 1}

_DIST_KIND = {
    "friedman1": "regression",
    "gaussian_linear": "regression",
    "gaussian_location": "location",
    "finite": "location",
}
_LOSS_KIND = {"squared_location": "location", "ols_regression": "regression"}


def parse_config(text: str) -> ExperimentSpec:
    """Parse and validate a flat key = value config."""
    raw: dict = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise ParseError(line_no, f"expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KEY_PARSERS:
            raise ValidationError(key, "unknown key")
        if key in raw:
            raise ValidationError(key, "duplicate key")
        try:
            raw[key] = _KEY_PARSERS[key](value)
        except ValidationError:
            raise
        except ValueError as exc:
            raise ParseError(line_no, f"bad value for {key}: {exc}") from None
    return _validate(raw)


def _validate(raw: dict) -> ExperimentSpec:
    for key in _REQUIRED:
        if key not in raw:
            raise ValidationError(key, "required key is missing")
    dist, loss = raw["dist"], raw["loss"]
    if dist not in DISTS:
        raise ValidationError("dist", f"must be one of {', '.join(DISTS)}")
    if loss not in LOSSES:
        raise ValidationError("loss", f"must be one of {', '.join(LOSSES)}")
    if dist in _DIST_KIND and _DIST_KIND[dist] != _LOSS_KIND[loss]:
        raise ValidationError("loss", f"{loss} is incompatible with dist = {dist}")

    n, K = raw["n"], raw["K"]
    if n < 1 or K < 1:
        raise ValidationError("n", "n and K must be at least 1")
    r_list = sorted(raw["R"])
    if len(set(r_list)) != len(r_list):
        raise ValidationError("R", "duplicate round counts")
    for r in r_list:
        if r < 1:
            raise ValidationError("R", "round counts must be at least 1")
        if n % r != 0:
            raise ValidationError("R", f"R = {r} does not divide n = {n}")

    support = raw.get("support")
    if dist == "finite":
        if not support:
            raise ValidationError("support", "dist = finite needs support points")
        dims = {len(p) for p in support}
        if len(dims) != 1:
            raise ValidationError("support", "support points must share a dimension")
        d_inferred = dims.pop()
        if "d" in raw and raw["d"] != d_inferred:
            raise ValidationError("d", f"support points have dimension {d_inferred}")
        raw["d"] = d_inferred
        probs = raw.get("probs")
        if probs is not None and len(probs) != len(support):
            raise ValidationError("probs", "need one probability per support point")
    elif dist == "csv":
        if not raw.get("csv"):
            raise ValidationError("csv", "dist = csv needs a csv file path")
        raw.setdefault("d", 0)  # resolved when the file is loaded
    else:
        raw.setdefault("d", _DEFAULT_D[dist])
        if dist == "friedman1" and raw["d"] != FRIEDMAN1_DIM:
            raise ValidationError("d", f"friedman1 data has dimension {FRIEDMAN1_DIM}")

    spec = ExperimentSpec(
        n=n, K=K, R_list=r_list, dist=dist, loss=loss, d=raw["d"],
        **{k: v for k, v in raw.items() if k not in ("n", "K", "R", "dist", "loss", "d")},
    )
    for key in ("M", "M_inner", "N_test"):
        if getattr(spec, key) < 1:
            raise ValidationError(key, "must be at least 1")
    if spec.eta <= 0.0:
        raise ValidationError("eta", "learning rate must be positive")
    for key in ("sigma_xi", "sigma", "noise_sigma"):
        if getattr(spec, key) < 0.0:
            raise ValidationError(key, "must be nonnegative")
    if spec.L is not None and spec.L <= 0.0:
        raise ValidationError("L", "smoothness override must be positive")
    if spec.a_prime_r1 not in ("trained", "init"):
        raise ValidationError("a_prime_r1", "must be 'trained' or 'init'")
    return spec


def load_dataset_csv(path: str):
    """Dataset CSV: header x1..xd,y (regression) or z1..zd (location)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv_mod.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(1, "empty csv file") from None
        header = [h.strip() for h in header]
        if header and header[-1] == "y":
            cols = header[:-1]
            expected = [f"x{i}" for i in range(1, len(cols) + 1)]
            kind = "regression"
        else:
            cols = header
            expected = [f"z{i}" for i in range(1, len(cols) + 1)]
            kind = "location"
        if cols != expected or not cols:
            raise ParseError(1, f"expected columns {expected} (+ y for regression)")
        d = len(cols)
        feats, labels = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            want = d + (1 if kind == "regression" else 0)
            if len(row) != want:
                raise ParseError(line_no, f"expected {want} values, got {len(row)}")
            try:
                vals = [float(v) for v in row]
            except ValueError as exc:
                raise ParseError(line_no, str(exc)) from None
            feats.append(vals[:d])
            if kind == "regression":
                labels.append(vals[d])
    if not feats:
        raise ParseError(2, "csv file holds no data rows")
    feats_arr = np.asarray(feats, dtype=np.float64)
    labels_arr = np.asarray(labels, dtype=np.float64) if kind == "regression" else None
    return kind, feats_arr, labels_arr


def build_distribution(spec: ExperimentSpec) -> DataDistribution:
    if spec.dist == "friedman1":
        return Friedman1(noise_sigma=spec.noise_sigma)
    if spec.dist == "gaussian_location":
        return GaussianLocation(np.full(spec.d, spec.mean), spec.sigma)
    if spec.dist == "gaussian_linear":
        return GaussianLinear(np.full(spec.d, spec.wstar), spec.noise_sigma)
    if spec.dist == "finite":
        points = np.asarray(spec.support, dtype=np.float64)
        if spec.probs is None:
            fdist = FiniteDistribution.uniform_locations(points)
        else:
            fdist = FiniteDistribution(
                FiniteDistribution.uniform_locations(points).samples,
                np.asarray(spec.probs, dtype=np.float64),
            )
        return Finite(fdist)
    kind, feats, labels = load_dataset_csv(spec.csv)
    if _LOSS_KIND[spec.loss] != kind:
        raise ValidationError("loss", f"{spec.loss} is incompatible with the {kind} csv")
    return Empirical.from_pool(feats, labels, derive_stream(spec.seed, "csv-split", 0))


def _run_config(spec: ExperimentSpec, R: int) -> RunConfig:
    d = spec.d
    return RunConfig(
        n=spec.n,
        K=spec.K,
        schedule=Schedule.constant(R, spec.n // R, spec.eta),
        w0=np.full(d, spec.w0),
        loss=spec.loss,
        noise_sigma=spec.sigma_xi,
        seed=spec.seed,
        smoothness=spec.L,
    )


def _seq_mean(values) -> float:
    total = 0.0
    for v in values:
        total += float(v)
    return total / len(values)


def run_sweep(spec: ExperimentSpec, mode: str = "sweep", threads: int | None = None) -> ResultsTable:
    """One table row per R; `mode` picks gen estimation, bound, or both."""
    if mode not in ("sweep", "gen", "bound"):
        raise ValueError(f"unknown mode {mode!r}")
    want_gen = mode in ("sweep", "gen")
    want_bound = mode in ("sweep", "bound")
    if want_bound and spec.sigma_xi > 0.0:
        raise NoisyRunUnsupportedError("bound evaluation needs sigma_xi = 0")
    threads = resolve_threads(threads)
    mu = build_distribution(spec)
    if spec.dist == "csv":
        spec.d = mu.dim
    family = get_family(spec.loss)
    keep_timing = os.environ.get("FEDGEN_TIMING") == "1"

    rows = []
    for R in spec.R_list:
        config = _run_config(spec, R)
        t0 = time.perf_counter()
        if want_gen:
            stats = gen_replicate_table(
                config, mu, family, spec.M, spec.N_test, want_proxy=True, threads=threads
            )
            gen_est = mc_estimate([s[0] for s in stats])
            emp = _seq_mean([s[1] for s in stats])
            pop = _seq_mean([s[2] for s in stats])
            proxy = _seq_mean([s[3] for s in stats])
        else:
            gen_est, emp, pop, proxy = MCEstimate(0.0, 0.0, spec.M), 0.0, 0.0, 0.0
        if want_bound:
            bd = theorem_bound(
                config,
                mu,
                family,
                m_outer=spec.M,
                m_inner=spec.M_inner,
                m2=spec.M,
                n_test=spec.N_test,
                full_term2=spec.full_term2,
                a_prime_r1=spec.a_prime_r1,
                threads=threads,
            )
            term1, term2, total = bd.term1_total.mean, bd.term2_total.mean, bd.total
        else:
            term1, term2, total = 0.0, 0.0, MCEstimate(0.0, 0.0, spec.M)
        seconds = time.perf_counter() - t0
        print(f"[fedgen] R={R} done in {seconds:.2f}s ({mode})", file=sys.stderr)
        rows.append(
            SweepRow(
                R=R,
                gen=gen_est,
                bound_term1=term1,
                bound_term2=term2,
                bound_total=total,
                emp_risk=emp,
                pop_risk=pop,
                proxy_delta=proxy,
                seconds=seconds if keep_timing else 0.0,
            )
        )
    meta = {
        "artifact_version": __version__,
        "seed": spec.seed,
        "mode": mode,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z") if keep_timing else None,
        "spec": spec.echo(),
    }
    return ResultsTable(tuple(rows), meta)


# ---------------------------------------------------------------------------
# command line


def _emit_outputs(table: ResultsTable, spec: ExperimentSpec, args) -> None:
    out = args.out or spec.out
    json_path = args.json or spec.json
    svg_path = args.svg or spec.svg
    csv_text = emit_csv(table)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            fh.write(emit_json(table))
    if svg_path:
        with open(svg_path, "w", encoding="utf-8") as fh:
            fh.write(emit_svg_plot(table))


def _load_spec(args) -> ExperimentSpec:
    with open(args.config, encoding="utf-8") as fh:
        spec = parse_config(fh.read())
    if args.seed is not None:
        spec.seed = args.seed
    if args.m is not None:
        if args.m < 1:
            raise ValidationError("M", "must be at least 1")
        spec.M = args.m
    if args.full_term2:
        spec.full_term2 = True
    return spec


def _cmd_table(args, mode: str) -> int:
    spec = _load_spec(args)
    table = run_sweep(spec, mode=mode)
    _emit_outputs(table, spec, args)
    return 0


def _cmd_verify(args) -> int:
    results = run_suite(perturb_aggregation=args.perturb_aggregation)
    width = max(len(r.label) for r in results)
    failures = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        failures += 0 if r.passed else 1
        print(
            f"{status} {r.label:<{width}} {r.report.kind:<10} "
            f"lhs={r.report.lhs:+.12e} rhs={r.report.rhs:+.12e} "
            f"slack={r.report.slack:+.3e}"
        )
    print(f"{len(results)} checks: {len(results) - failures} passed, {failures} failed")
    return 0 if failures == 0 else 1


def _cmd_ingest(args) -> int:
    kind, feats, labels = load_dataset_csv(args.file)
    print(f"kind: {kind}")
    print(f"rows: {feats.shape[0]}")
    print(f"dim: {feats.shape[1]}")
    if labels is not None:
        print(f"label range: [{labels.min():.6g}, {labels.max():.6g}]")
    print("ok: usable as 'dist = csv' with this file path")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fedgen",
        description="Federated SGD generalization-error experiments",
    )
    parser.add_argument("--version", action="version", version=f"fedgen {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("sweep", "measured gen error and bound over the R list"),
        ("gen", "measured gen error only"),
        ("bound", "bound evaluation only"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config")
        p.add_argument("--out", help="CSV output path (default stdout)")
        p.add_argument("--json", help="JSON output path")
        p.add_argument("--svg", help="SVG plot output path")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--m", type=int, help="override the replicate count M")
        p.add_argument("--full-term2", action="store_true", dest="full_term2",
                       help="deterministic full (k, i) sum in the coupling term")

    pv = sub.add_parser("verify", help="run the exact enumeration suite")
    pv.add_argument("--perturb-aggregation", type=float, default=0.0,
                    help="test hook: offset the mean aggregation by eps * first model")

    pi = sub.add_parser("ingest-csv", help="validate a dataset csv file")
    pi.add_argument("file")

    args = parser.parse_args(argv)
    try:
        if args.command in ("sweep", "gen", "bound"):
            return _cmd_table(args, args.command)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_ingest(args)
    except (ParseError, ValidationError, NoisyRunUnsupportedError, TooFewRowsError) as exc:
        print(f"fedgen: config error: {exc}", file=sys.stderr)
        return 2
    except FedgenError as exc:
        print(f"fedgen: error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"fedgen: {exc}", file=sys.stderr)
        return 3


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
