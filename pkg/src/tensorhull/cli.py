"""Command-line driver: ``tensorhull <command> [flags]``.

Every run writes plot data (CSV/JSON) and ``manifest.json`` into the output
directory. Files carry the hash of the resolved config, contain no
timestamps and are byte-identical across reruns of the same config. Errors
are reported as a JSON record on stderr (and ``error.json`` when the output
directory is writable) with a nonzero exit status.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .approx import ApproximationLadder, residual_profile, truncated_power
from .errors import CapacityError, DomainError
from .hull import (
    DiscreteLadder,
    ScalingConfig,
    choose_u,
    discrete_design,
    max_entries,
    maurey_mse,
    sample_hull_betas,
    sample_local_betas,
    scaling_experiment,
    two_scale_cover,
)
from .mrabasis import build_dictionary
from .rng import substream
from .sparsegrid import SparseGridSpace, choose_K, dimension_rate, tail_bound

EXIT_OK, EXIT_FAILURE, EXIT_USAGE, EXIT_DOMAIN, EXIT_CAPACITY = 0, 1, 2, 3, 4

REQUIRED = {
    "basis": ("q", "levels"),
    "delta": ("q", "levels", "grid"),
    "cover": ("q", "m", "eps"),
    "sparsegrid": ("q", "d"),
    "maurey": ("s",),
    "entropy-exp": ("q", "d", "m"),
}

DEFAULTS = {
    "basis": {"samples": 65},
    "delta": {},
    "cover": {"samples": 1000},
    "sparsegrid": {},
    "maurey": {"m": 16, "p": 32, "reps": 10000},
    "entropy-exp": {"samples": 2000, "variant": "shifted"},
}


@dataclass
class ExperimentConfig:
    command: str | None = None
    params: dict = field(default_factory=dict)
    out: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        command = data.pop("command", None)
        out = data.pop("out", None)
        params = dict(data.pop("params", {}))
        params.update(data)
        return cls(command, params, out)

    def resolved(self) -> dict:
        """Parameters with command defaults and the seed filled in."""
        p = dict(DEFAULTS.get(self.command, {}))
        p.update({k: v for k, v in self.params.items() if v is not None})
        p.setdefault("seed", 0)
        return p

    def to_json(self) -> dict:
        return {"command": self.command, "params": self.resolved()}

    @property
    def hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


# --- validation ----------------------------------------------------------------------------


def _diag(level, fieldname, message):
    return {"level": level, "field": fieldname, "message": message}


def validate(config) -> list:
    """All violated guards for a config, without running anything."""
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    out = []
    if not config.command:
        out.append(_diag("error", "command", f"missing field 'command' (one of {', '.join(REQUIRED)})"))
    elif config.command not in REQUIRED:
        out.append(_diag("error", "command", f"unknown command {config.command!r}"))
    if not config.out:
        out.append(_diag("error", "out", "missing field 'out' (output directory)"))
    if config.command not in REQUIRED:
        return out
    p = config.resolved()
    for name in REQUIRED[config.command]:
        if p.get(name) is None:
            out.append(_diag("error", name, f"missing field {name!r}"))
    if config.command == "sparsegrid" and p.get("K") is None and p.get("eps") is None:
        out.append(_diag("error", "K", "sparsegrid needs 'K' or 'eps'"))
    q = p.get("q")
    if isinstance(q, int) and q >= 1:
        gamma = 1 / math.sqrt(2 * q - 1)
        for e in _as_list(p.get("eps")):
            if e >= gamma:
                out.append(_diag("warning", "eps", f"epsilon={e} >= gamma={gamma:.6g}: level-0 space suffices"))
        if config.command in ("cover", "entropy-exp") and q not in (1, 2):
            out.append(_diag("error", "q", f"discrete designs exist for q in {{1, 2}}, got {q}"))
    if config.command in ("cover", "entropy-exp") and p.get("m"):
        m, d = int(p["m"]), int(p.get("d", 1))
        cols = m if q == 1 else m - 2
        need = m**d * cols**d
        if need > max_entries():
            out.append(_diag("error", "m", f"design needs {need} entries (m^d p^d), budget is {max_entries()}"))
    return out


def _as_list(v):
    if v is None:
        return []
    if isinstance(v, (list, tuple)):
        return [float(x) for x in v]
    return [float(v)]


# --- output helpers --------------------------------------------------------------------------


def _fmt(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


class _Writer:
    def __init__(self, out: Path, config: ExperimentConfig):
        self.out, self.config, self.files = out, config, []

    def csv(self, name, columns, rows, header=()):
        lines = [f"# config_hash: {self.config.hash}"] + [f"# {h}" for h in header]
        lines.append(",".join(columns))
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        self._write(name, "\n".join(lines) + "\n")

    def json(self, name, payload):
        payload = {"config_hash": self.config.hash, **payload}
        self._write(name, json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")

    def _write(self, name, text):
        (self.out / name).write_text(text)
        self.files.append(name)

    def manifest(self):
        self.json("manifest.json", {
            "config": self.config.to_json(),
            "seed": self.config.resolved()["seed"],
            "version": __version__,
            "numpy": np.__version__,
            "files": sorted(self.files),
        })


def _json_default(x):
    if isinstance(x, Fraction):
        return _fmt(x)
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x)}")


# --- commands --------------------------------------------------------------------------------


def cmd_basis(p, w: _Writer):
    D = build_dictionary(int(p["q"]), int(p["levels"]))
    w.json("atoms.json", D.to_json())
    u, vals = D.sample_matrix(int(p["samples"]))
    cols = ["u"] + [f"p_{i + 1}" for i in range(len(D))]
    w.csv("samples.csv", cols, [[ui, *row] for ui, row in zip(u, vals)])


def _power_of_two(n):
    return n >= 1 and n & (n - 1) == 0


def cmd_delta(p, w: _Writer):
    q, levels, grid = int(p["q"]), int(p["levels"]), int(p["grid"])
    if not _power_of_two(grid):
        raise DomainError("grid must be a power of two (v = j / grid must be dyadic)")
    ladder = ApproximationLadder(q, levels)
    best = [Fraction(-1)] * (levels + 1)
    arg = [None] * (levels + 1)
    for j in range(grid):
        v = Fraction(j, grid)
        for k, r2 in enumerate(residual_profile(truncated_power(q, v), ladder)):
            if r2 > best[k]:
                best[k], arg[k] = r2, v
    rows = [[k, ladder.dimension(k), math.sqrt(best[k]), best[k], arg[k], ladder.bound(k), ladder.bound2(k)]
            for k in range(levels + 1)]
    header = [f"gamma = 1/sqrt({2 * q - 1}) = {ladder.gamma:.17g}", f"W = 2/{2 * q - 1} = {ladder.W:.17g}",
              f"bound = gamma * 2**(-k/W); v grid = j/{grid}"]
    w.csv("delta.csv", ["k", "dimension", "delta", "delta2", "argmax_v", "bound", "bound2"], rows, header)


def cmd_cover(p, w: _Writer):
    q, m, seed = int(p["q"]), int(p["m"]), int(p["seed"])
    X = discrete_design(m, q, p.get("variant", "shifted"))
    W = 2.0 / (2 * q - 1)
    ladder = DiscreteLadder(m, q)
    rows = []
    for i, e in enumerate(_as_list(p["eps"])):
        u = float(p["u"]) if p.get("u") is not None else max(choose_u(e, W), e)
        K, V, _ = ladder.smallest_level(X.columns, u)
        b0 = sample_hull_betas(X.p, 1, seed, include_vertices=False, tag=f"cover-f0-{i}")[0]
        cover = two_scale_cover(X, V, e, u, X.columns @ b0, seed=seed)

        def step(b, b0=b0, e=e):
            gap = np.linalg.norm(X.columns @ (b - b0))
            return 16 * e / gap if gap > 0 else 1.0

        B = sample_local_betas(b0, X.p, int(p["samples"]), step, seed, tag=f"cover-pts-{i}")
        dist = max(cover.center(b, task=t)[1] for t, b in enumerate(B))
        rows.append([e, u, K, V.shape[1], cover.r, cover.s, cover.N, cover.log_count, cover.budget, dist, dist / e])
    cols = ["epsilon", "u", "level", "M", "r", "s", "N", "log_count", "budget", "max_dist", "max_dist_over_eps"]
    w.csv("cover.csv", cols, rows)


def cmd_sparsegrid(p, w: _Writer):
    q, d = int(p["q"]), int(p["d"])
    gamma, W = 1 / math.sqrt(2 * q - 1), 2 / (2 * q - 1)
    if p.get("eps") is not None:
        eps = _as_list(p["eps"])
        rows = []
        for e in eps:
            c = choose_K(e, gamma, W, d, q)
            rows.append([e, c.K, c.dimension, c.dimension_bound, c.tail])
        w.csv("sparsegrid.csv", ["epsilon", "K", "dimension", "dimension_bound", "tail_bound"], rows)
        if len(eps) >= 4:
            r = dimension_rate(eps, q, d)
            w.json("rate.json", {"exponent": r.exponent, "log_power": r.log_power, "method": r.method, "W": W})
    else:
        rows = []
        for K in range(int(p["K"]) + 1):
            s = SparseGridSpace(d, q, K)
            rows.append([K, s.dimension, s.dimension_bound, tail_bound(gamma, W, K, d) if K >= 1 else float("nan")])
        w.csv("sparsegrid.csv", ["K", "dimension", "dimension_bound", "tail_bound"], rows)


def cmd_maurey(p, w: _Writer):
    m, n_cols, reps, seed = int(p["m"]), int(p["p"]), int(p["reps"]), int(p["seed"])
    rng = substream(seed, "maurey-columns", 0)
    X = rng.standard_normal((m, n_cols))
    X /= np.linalg.norm(X, axis=0)
    beta = np.full(n_cols, 1.0 / n_cols)
    rows, ss, ms = [], [], []
    for s in (int(x) for x in _as_list(p["s"])):
        mse, se = maurey_mse(X, beta, s, reps, seed)
        rows.append([s, mse, se, 1.0 / s])
        ss.append(s)
        ms.append(mse)
    w.csv("maurey.csv", ["s", "mse", "std_error", "bound"], rows)
    if len(ss) >= 2:
        slope = float(np.polyfit(np.log(ss), np.log(ms), 1)[0])
        w.json("maurey.json", {"loglog_slope": slope})


def cmd_entropy(p, w: _Writer):
    cfg = ScalingConfig(q=int(p["q"]), d=int(p["d"]), m=int(p["m"]), epsilons=_as_list(p.get("eps")) or None,
                        samples=int(p["samples"]), seed=int(p["seed"]), variant=p["variant"])
    r = scaling_experiment(cfg)
    cols = list(r.rows[0])
    w.csv("entropy.csv", cols, [[row[c] for c in cols] for row in r.rows])
    w.json("entropy.json", r.to_json())
    print(f"slope {r.slope:.4f} (target {r.target:.4f}), sample slope {r.sample_slope:.4f}")


HANDLERS = {
    "basis": cmd_basis,
    "delta": cmd_delta,
    "cover": cmd_cover,
    "sparsegrid": cmd_sparsegrid,
    "maurey": cmd_maurey,
    "entropy-exp": cmd_entropy,
}


# --- entry points ----------------------------------------------------------------------------


def _eps_list(text):
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tensorhull", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--config", help="JSON config file; flags override its values")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--validate", action="store_true", help="print diagnostics and exit")
        return sp

    sp = common(sub.add_parser("basis", help="orthonormal dictionary atoms"))
    sp.add_argument("--q", type=int)
    sp.add_argument("--levels", type=int)
    sp.add_argument("--samples", type=int)

    sp = common(sub.add_parser("delta", help="ladder residuals of truncated powers"))
    sp.add_argument("--q", type=int)
    sp.add_argument("--levels", type=int)
    sp.add_argument("--grid", type=int)

    sp = common(sub.add_parser("cover", help="two-scale cover validity on a discrete design"))
    sp.add_argument("--q", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--eps", type=_eps_list)
    sp.add_argument("--u", type=float)
    sp.add_argument("--samples", type=int)

    sp = common(sub.add_parser("sparsegrid", help="hyperbolic-cross dimensions and tail bounds"))
    sp.add_argument("--q", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--K", type=int)
    sp.add_argument("--eps", type=_eps_list)

    sp = common(sub.add_parser("maurey", help="Monte-Carlo check of Maurey sparsification"))
    sp.add_argument("--m", type=int)
    sp.add_argument("--p", type=int)
    sp.add_argument("--s", type=_eps_list)
    sp.add_argument("--reps", type=int)

    sp = common(sub.add_parser("entropy-exp", help="entropy exponent scaling experiment"))
    sp.add_argument("--q", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--eps", type=_eps_list)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--variant", choices=("shifted", "aligned"))
    return parser


def config_from_args(args) -> ExperimentConfig:
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
    cfg = ExperimentConfig.from_dict(base)
    cfg.command = args.command
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "out", "validate") and v is not None}
    cfg.params.update(flags)
    if args.out:
        cfg.out = args.out
    return cfg


def _error_record(kind, exc, out=None):
    rec = {"error": kind, "message": str(exc)}
    for attr in ("parameter", "required"):
        if getattr(exc, attr, None) is not None:
            rec[attr] = getattr(exc, attr)
    text = json.dumps(rec, sort_keys=True, default=str)
    print(text, file=sys.stderr)
    if out is not None:
        try:
            Path(out).mkdir(parents=True, exist_ok=True)
            (Path(out) / "error.json").write_text(text + "\n")
        except OSError:
            pass
    return rec


def run(command: str, config: ExperimentConfig) -> int:
    """Dispatch ``command`` and write its artifacts; returns the exit status."""
    if command not in HANDLERS:
        _error_record("usage", f"unknown command {command!r}")
        return EXIT_USAGE
    config.command = command
    problems = [d for d in validate(config) if d["level"] == "error"]
    if problems:
        kind = "capacity" if any("budget" in d["message"] for d in problems) else "usage"
        rec = {"error": kind, "message": "; ".join(d["message"] for d in problems),
               "diagnostics": problems}
        if kind == "capacity":
            rec["parameter"] = next(d["field"] for d in problems if "budget" in d["message"])
        text = json.dumps(rec, sort_keys=True)
        print(text, file=sys.stderr)
        return EXIT_CAPACITY if kind == "capacity" else EXIT_USAGE
    out = Path(config.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        writer = _Writer(out, config)
        HANDLERS[command](config.resolved(), writer)
        writer.manifest()
    except CapacityError as exc:
        _error_record("capacity", exc, out)
        return EXIT_CAPACITY
    except DomainError as exc:
        _error_record("domain", exc, out)
        return EXIT_DOMAIN
    except OSError as exc:
        _error_record("io", exc)
        return EXIT_FAILURE
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        _error_record("usage", "no command given")
        return EXIT_USAGE
    cfg = config_from_args(args)
    if args.validate:
        print(json.dumps(validate(cfg), indent=2))
        return EXIT_OK
    if cfg.out is None:
        cfg.out = "out"
    return run(args.command, cfg)


if __name__ == "__main__":
    sys.exit(main())
