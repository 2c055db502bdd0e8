"""Command-line audits and experiments.

Every subcommand writes one table (CSV, or JSON with a config echo) and
exits 0 when every row passes, 1 when any check fails, 2 on usage errors.
``--p`` and ``--d`` accept comma-separated lists; each (p, d) pair is one
task, and ``--workers`` runs tasks in parallel without changing the output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import char_sums, configs, ortho
from .field import check_modulus, legendre_int, odd_primes
from .geom import DenseSet, Point, check_space, load_set, random_dense_set, sphere_size
from .limits import BudgetExceeded


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    p: list[int]
    d: list[int]
    r: int | None = None
    alphas: list[int] | None = None
    k: int = 2
    rho: float = 1.0
    seed: int = 0
    mode: str = "exact"
    samples: int = 0
    trials: int = 1000
    set_path: str | None = None
    fmt: str = "csv"
    out: str | None = None
    workers: int = 1

    def echo(self) -> dict:
        """Config fields that determine the output (not out path or workers)."""
        data = asdict(self)
        data.pop("out")
        data.pop("workers")
        return data


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _validate(cfg: RunConfig) -> RunConfig:
    for p in cfg.p:
        try:
            check_modulus(p)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if not 0 < cfg.rho <= 1:
        raise UsageError(f"--rho must lie in (0, 1], got {cfg.rho}")
    if cfg.alphas is not None:
        if any(a % p == 0 for a in cfg.alphas for p in cfg.p):
            raise UsageError("--alphas must be nonzero modulo every p")
        if cfg.r is not None and cfg.r != len(cfg.alphas) + 1:
            raise UsageError("--r must equal the number of alphas plus one")
    if cfg.workers < 1:
        raise UsageError("--workers must be positive")
    return cfg


def _alphas(cfg: RunConfig, default_r: int) -> tuple[int, ...]:
    if cfg.alphas is not None:
        return tuple(cfg.alphas)
    return (1,) * ((cfg.r or default_r) - 1)


def _input_set(cfg: RunConfig, p: int, d: int) -> tuple[DenseSet, float]:
    """The set to analyse and the density rho used in normalizations."""
    if cfg.set_path:
        E = load_set(cfg.set_path)
        if (E.p, E.d) != (p, d):
            raise UsageError(f"--set holds a subset of F_{E.p}^{E.d}, not F_{p}^{d}")
        return E, E.density
    return random_dense_set(p, d, cfg.rho, cfg.seed), cfg.rho


# -- tasks: each returns (rows, all_ok) ---------------------------------------

def task_sphere(cfg: RunConfig, p: int, d: int):
    rows, ok = [], True
    audit = char_sums.sphere_hat_decay_audit(p, d)
    for t in range(1, p):
        size = sphere_size(p, d, t)
        dev = size - p ** (d - 1)
        bound = 2 * p ** ((d - 1) / 2)
        ratio = audit.per_t[t - 1]
        row_ok = abs(dev) <= bound and ratio <= 2 + 1e-6
        ok &= row_ok
        rows.append({"p": p, "d": d, "t": t, "sphere_size": size,
                     "main_term": p ** (d - 1), "deviation": dev,
                     "deviation_bound": bound, "decay_ratio": ratio,
                     "closed_form_error": audit.closed_form_error, "ok": row_ok})
    ok &= sum(sphere_size(p, d, t) for t in range(p)) == p**d
    return rows, ok


def task_gauss(cfg: RunConfig, p: int, d: int):
    g1 = char_sums.gauss_sum(1, p)
    abs_err = abs(abs(g1) ** 2 - p)
    ident = max(abs(char_sums.gauss_sum(j, p) - legendre_int(j, p) * g1)
                for j in range(1, p))
    Q = g1 / math.sqrt(p)
    label = min(("1", 1), ("-1", -1), ("i", 1j), ("-i", -1j),
                key=lambda kv: abs(Q - kv[1]))[0]
    row_ok = abs_err <= 1e-8 and ident <= 1e-10
    return [{"p": p, "gauss_re": g1.real, "gauss_im": g1.imag,
             "abs_sq_error": abs_err, "identity_error": ident, "Q": label,
             "p_mod_4": p % 4, "ok": row_ok}], row_ok


def task_kloosterman(cfg: RunConfig, p: int, d: int):
    rows, ok = [], True
    for psi in char_sums.MultChar:
        ratio, a = char_sums.weil_ratio(p, psi)
        row_ok = ratio <= 2 + 1e-9
        ok &= row_ok
        rows.append({"p": p, "character": psi.value, "max_ratio": ratio,
                     "argmax_a": a, "ok": row_ok})
    return rows, ok


def task_hinge(cfg: RunConfig, p: int, d: int):
    alphas = _alphas(cfg, default_r=3)
    E, _ = _input_set(cfg, p, d)
    spec = configs.HingeSpec(alphas, p)
    rep = configs.hinge_report(E, spec)
    check, row_ok = "n/a", True
    if spec.r == 2:
        row_ok = configs.two_hinge_check(E, alphas[0]).ok
        check = "pass" if row_ok else "fail"
    return [{"p": p, "d": d, "r": spec.r, "alphas": " ".join(map(str, alphas)),
             "set_size": rep.set_size, "exact": rep.exact,
             "main_term": rep.main_term, "relative_error": rep.relative_error,
             "sphere_main_term": rep.sphere_main_term,
             "bound_check": check}], row_ok


def task_census(cfg: RunConfig, p: int, d: int):
    E, rho = _input_set(cfg, p, d)
    res = configs.simplex_census(E, cfg.k, mode=cfg.mode, samples=cfg.samples,
                                 seed=cfg.seed)
    scale = rho ** (cfg.k - 1) * p ** math.comb(cfg.k + 1, 2)
    return [{"p": p, "d": d, "k": cfg.k, "rho": rho, "seed": cfg.seed,
             "set_size": E.cardinality, "mode": res.mode, "samples": res.samples,
             "distinct_classes": res.distinct_classes,
             "degenerate_tuples": res.degenerate_tuples,
             "permutation_classes": res.permutation_classes,
             "ratio": res.distinct_classes / scale}], True


def task_ortho(cfg: RunConfig, p: int, d: int):
    G = ortho.enumerate_orthogonal_group(p, d)
    expected = ortho.expected_o2_order(p) if d == 2 else None
    ok = G.check_closure(seed=cfg.seed) and (expected is None or expected == len(G))
    rows = []
    for row in ortho.orbit_table(G):
        ok &= row["orbit_stabilizer_ok"]
        rows.append({"p": p, "d": d, "group_order": len(G),
                     "expected_order": "" if expected is None else expected, **row})
    return rows, ok


def task_dichotomy(cfg: RunConfig, p: int, d: int):
    alphas = _alphas(cfg, default_r=d + 1)
    E, rho = _input_set(cfg, p, d)
    G = ortho.enumerate_orthogonal_group(p, d)
    rows = ortho.dichotomy_rows(G, E, configs.HingeSpec(alphas, p), rho)
    return [{"p": p, "d": d, **row} for row in rows], True


def degenerate_fixtures(p: int, d: int) -> list[tuple[list[Point], list[Point]]]:
    """Pairs (V, W) with equal distance vectors where V does not span F_p^d."""
    zero = Point((0,) * d, p)
    e1 = Point((1,) + (0,) * (d - 1), p)
    line = [e1.scale(i) for i in range(d + 1)]
    flipped = [(-e1).scale(i) for i in range(d + 1)]
    pairs = [([zero] * (d + 1), [zero] * (d + 1))]
    if d >= 2:
        pairs.append((line, flipped))
    iso = next((x for x in _nonzero_points(p, d)
                if sum(c * c for c in x.coords) % p == 0), None)
    if iso is not None:
        # points on an isotropic line against a single repeated point
        pairs.append(([iso.scale(i) for i in range(d + 1)], [zero] * (d + 1)))
    return pairs


def _nonzero_points(p: int, d: int):
    for idx in range(1, p**d):
        coords = []
        for _ in range(d):
            idx, c = divmod(idx, p)
            coords.append(c)
        yield Point(tuple(coords), p)


def isometry_trials(p: int, d: int, trials: int, seed: int) -> tuple[int, int]:
    """Apply random group elements plus translations; count exact recoveries."""
    G = ortho.enumerate_orthogonal_group(p, d)
    rng = np.random.default_rng(np.random.SeedSequence([seed, p, d]))
    recovered = 0
    for _ in range(trials):
        while True:
            V = [Point(tuple(rng.integers(0, p, d)), p) for _ in range(d + 1)]
            if configs.rank_of_simplex(V) == d:
                break
        A = G.elements[rng.integers(len(G))]
        tau = Point(tuple(rng.integers(0, p, d)), p)
        W = [Point(tuple(A @ np.array(v.coords)), p) + tau for v in V]
        iso = configs.recover_isometry(V, W)
        if (np.array_equal(iso.matrix, A)
                and np.array_equal((iso.matrix.T @ iso.matrix) % p, np.eye(d, dtype=np.int64))
                and all(iso(v) == w for v, w in zip(V, W))
                and iso.translation == tau):
            recovered += 1
    return recovered, trials


def task_isometry(cfg: RunConfig, p: int, d: int):
    recovered, trials = isometry_trials(p, d, cfg.trials, cfg.seed)
    fixtures = degenerate_fixtures(p, d)
    rejected = 0
    for V, W in fixtures:
        try:
            configs.recover_isometry(V, W)
        except configs.DegenerateSimplexError:
            rejected += 1
    ok = recovered == trials and rejected == len(fixtures)
    return [{"p": p, "d": d, "trials": trials, "recovered": recovered,
             "degenerate_fixtures": len(fixtures), "degenerate_rejected": rejected,
             "ok": ok}], ok


TASKS: dict[str, Callable] = {
    "sphere-audit": task_sphere,
    "gauss-audit": task_gauss,
    "kloosterman-audit": task_kloosterman,
    "hinge-audit": task_hinge,
    "census": task_census,
    "ortho-audit": task_ortho,
    "dichotomy": task_dichotomy,
    "isometry-selftest": task_isometry,
}

PRIME_SWEEPS = {"gauss-audit", "kloosterman-audit"}


def _run_task(args):
    cfg, p, d = args
    return TASKS[cfg.command](cfg, p, d)


def run(cfg: RunConfig) -> tuple[list[dict], bool]:
    dims = [1] if cfg.command in PRIME_SWEEPS else cfg.d
    jobs = [(cfg, p, d) for p in cfg.p for d in dims]
    if cfg.command not in PRIME_SWEEPS:
        for _, p, d in jobs:
            check_space(p, d)
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_task, jobs))
    else:
        results = [_run_task(job) for job in jobs]
    rows = [row for part, _ in results for row in part]
    return rows, all(ok for _, ok in results)


# -- output -------------------------------------------------------------------

def _cell(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Point):
        return " ".join(map(str, value.coords))
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def render(cfg: RunConfig, rows: list[dict]) -> str:
    rows = [{k: _cell(v) for k, v in row.items()} for row in rows]
    if cfg.fmt == "json":
        return json.dumps({"config": cfg.echo(), "rows": rows}, indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=_int_list, default=None,
                        help="prime modulus, or a comma-separated list")
    common.add_argument("--d", type=_int_list, default=[2], help="dimension(s)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--workers", type=int, default=1)

    setopts = argparse.ArgumentParser(add_help=False)
    setopts.add_argument("--rho", type=float, default=1.0)
    setopts.add_argument("--set", dest="set_path", default=None,
                         help="fqset file to use instead of a random set")

    hingeopts = argparse.ArgumentParser(add_help=False)
    hingeopts.add_argument("--r", type=int, default=None)
    hingeopts.add_argument("--alphas", type=_int_list, default=None)

    parser = argparse.ArgumentParser(prog="fqgeom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sphere-audit", parents=[common],
                   help="sphere sizes and Fourier decay")
    sweep_help = {"gauss-audit": "Gauss sums against eta(j) G_1 and |G_1|^2 = p",
                  "kloosterman-audit": "Kloosterman and Salie sums against 2 sqrt(p)"}
    for name in sorted(PRIME_SWEEPS):
        sp = sub.add_parser(name, parents=[common], help=sweep_help[name])
        sp.add_argument("--pmax", type=int, default=None,
                        help="audit every odd prime up to this bound")
    sub.add_parser("hinge-audit", parents=[common, setopts, hingeopts],
                   help="exact hinge counts against their main terms")
    cp = sub.add_parser("census", parents=[common, setopts],
                        help="distinct simplex classes")
    cp.add_argument("--k", type=int, default=2)
    cp.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    cp.add_argument("--samples", type=int, default=0)
    sub.add_parser("ortho-audit", parents=[common],
                   help="orthogonal group order and orbit-stabilizer table")
    sub.add_parser("dichotomy", parents=[common, setopts, hingeopts],
                   help="hinge stabilizer sizes per centre")
    ip = sub.add_parser("isometry-selftest", parents=[common],
                        help="recover random isometries from simplices")
    ip.add_argument("--trials", type=int, default=1000)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    p = ns.p
    if getattr(ns, "pmax", None):
        p = odd_primes(ns.pmax)
    if not p:
        raise UsageError("--p (or --pmax) is required")
    keys = RunConfig.__dataclass_fields__
    extra = {k: v for k, v in vars(ns).items() if k in keys and k not in ("p",)}
    return _validate(RunConfig(p=p, **extra))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        rows, ok = run(cfg)
    except (UsageError, BudgetExceeded, ValueError) as exc:
        print(f"fqgeom: error: {exc}", file=sys.stderr)
        return 2
    text = render(cfg, rows)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
