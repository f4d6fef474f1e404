"""Batch experiment driver.

    finitecomb sumprod q=13 n=2,3 mode=exhaustive out=results
    finitecomb verify-all q=7
    finitecomb plot dir=results

Parameters come from an INI file (--config), then key=value words, then
--flags; later sources win. Exit status: 0 ok, 1 invariant violation,
2 bad configuration or input.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .errors import ConfigError, FiniteCombError, MissingResults
from .field import is_prime

KINDS = ("verify-all", "sumprod", "incidence", "distance", "kakeya")
MODES = ("exhaustive", "randomized")
WORKERS_ENV = "FINITECOMB_WORKERS"

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2

PROVENANCE = {
    "sumprod": "exhaustive: kernel subset scan (true minimum); randomized: hill-climb (upper bound)",
    "incidence": "exact incidence count over seeded instances",
    "distance": "exhaustive: kernel scan over point subsets; randomized: hill-climb (upper bound)",
    "kakeya": "hill-climb over base-point assignments (upper bound on the minimum)",
    "verify-all": "exhaustive and seeded invariant suites",
}


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    q: tuple[int, ...]
    sizes: tuple[int, ...] = ()
    mode: str = "exhaustive"
    trials: int = 0
    seed: int | None = None
    out: str = "results"
    format: str = "csv"
    generator: str = "uniform"
    statistic: str = "max"
    exclude_zero: bool = False

    def canonical(self) -> dict:
        """Every field that affects output bytes; out is excluded."""
        d = asdict(self)
        d.pop("out")
        d["q"] = list(self.q)
        d["sizes"] = list(self.sizes)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def _int_list(key: str, text: str, primes_only: bool = False) -> tuple[int, ...]:
    """Comma list with a..b ranges; ``primes_only`` keeps just the primes of a range."""
    vals = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            try:
                span = range(int(lo), int(hi) + 1)
                vals.extend(v for v in span if not primes_only or is_prime(v))
            except ValueError:
                raise ConfigError(f"{key}: bad range {part!r}") from None
            continue
        try:
            vals.append(int(part))
        except ValueError:
            raise ConfigError(f"{key}: not an integer: {part!r}") from None
    return tuple(vals)


def _bool(key: str, text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def _int(key: str, text: str) -> int:
    try:
        return int(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


KEYS = {"q", "n", "N", "sizes", "mode", "trials", "seed", "out", "format",
        "generator", "statistic", "exclude_zero", "dir"}


def build_config(kind: str, raw: dict[str, str]) -> ExperimentConfig:
    """Validate merged string parameters into an ExperimentConfig."""
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    unknown = set(raw) - KEYS
    if unknown:
        raise ConfigError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    qs = _int_list("q", raw.get("q", ""), primes_only=True)
    if not qs:
        raise ConfigError("q list is empty")
    for q in qs:
        if not is_prime(q):
            raise ConfigError(f"q={q} is not prime")
    size_text = raw.get("sizes", raw.get("n", raw.get("N", "")))
    sizes = _int_list("sizes", size_text)
    if kind in ("sumprod", "incidence", "distance") and not sizes:
        raise ConfigError(f"{kind} needs a size list (n=...)")
    for q in qs:
        for s in sizes:
            hi = q if kind == "sumprod" else q * q
            lo = 2 if kind == "sumprod" else 1
            if not lo <= s <= hi:
                raise ConfigError(f"size {s} out of range [{lo}, {hi}] for q={q}")
    mode = raw.get("mode", "randomized" if kind in ("incidence", "kakeya") else "exhaustive")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}")
    seed = raw.get("seed")
    if seed is None and mode == "randomized":
        raise ConfigError("seed is required for randomized runs")
    seed = _int("seed", seed) if seed is not None else None
    default_trials = {"sumprod": 2000, "distance": 2000, "incidence": 5, "kakeya": 4}.get(kind, 0)
    trials = _int("trials", raw.get("trials", default_trials))
    if mode == "randomized" and kind != "verify-all" and trials < 1:
        raise ConfigError("trials must be >= 1")
    fmt = raw.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    generator = raw.get("generator", "uniform")
    if generator not in ("uniform", "elekes", "grid"):
        raise ConfigError(f"unknown generator {generator!r}")
    statistic = raw.get("statistic", "max")
    if statistic not in ("max", "sum", "prod"):
        raise ConfigError(f"unknown statistic {statistic!r}")
    if kind == "distance":
        for q in qs:
            if q % 4 != 3:
                raise ConfigError(f"distance runs need q = 3 mod 4, got q={q}")
    if kind == "kakeya":
        for q in qs:
            if q > 13:
                raise ConfigError(f"kakeya search is limited to q <= 13, got q={q}")
    if kind == "verify-all":
        for q in qs:
            if not 3 <= q <= 13:
                raise ConfigError(f"verify-all needs 3 <= q <= 13, got q={q}")
    return ExperimentConfig(kind, tuple(sorted(set(qs))), tuple(sorted(set(sizes))), mode, trials,
                            seed, raw.get("out", "results"), fmt, generator, statistic,
                            _bool("exclude_zero", raw.get("exclude_zero", "0")))


def read_config_file(path: str, kind: str) -> dict[str, str]:
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keep n and N apart
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    out: dict[str, str] = {}
    for section in ("experiment", kind):
        if cp.has_section(section):
            out.update(cp.items(section))
    return out


def parse_pairs(words: list[str]) -> dict[str, str]:
    out = {}
    for w in words:
        if "=" not in w:
            raise ConfigError(f"expected key=value, got {w!r}")
        k, v = w.split("=", 1)
        out[k.strip()] = v.strip()
    return out


# ---------------------------------------------------------------------------
# cells


def _cells(cfg: ExperimentConfig) -> list[tuple]:
    if cfg.kind in ("kakeya", "verify-all"):
        return [(cfg, q, None) for q in cfg.q]
    return [(cfg, q, s) for q in cfg.q for s in cfg.sizes]


def _run_cell(cell):
    cfg, q, s = cell
    seed = cfg.seed if cfg.seed is not None else 0
    t0 = time.perf_counter()
    if cfg.kind == "sumprod":
        from .sumprod import sumprod_min_search
        res = [sumprod_min_search(q, s, cfg.mode, cfg.trials if cfg.mode == "randomized" else 0,
                                  seed, cfg.statistic)]
    elif cfg.kind == "incidence":
        from .incidence import st_experiment
        res = [st_experiment(q, s, cfg.generator, max(cfg.trials, 1), seed)]
    elif cfg.kind == "distance":
        from .distance import distance_min_search
        res = [distance_min_search(q, s, cfg.mode, cfg.trials if cfg.mode == "randomized" else 0,
                                   seed, cfg.exclude_zero)]
    elif cfg.kind == "kakeya":
        from .kakeya import kakeya_min_search
        res = [kakeya_min_search(q, max(cfg.trials, 1), seed)]
    else:
        from .verify import verify_all
        res = verify_all(q, seed)
    return (q, s), res, time.perf_counter() - t0


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def _write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _render(cfg: ExperimentConfig, results: list) -> dict[str, str]:
    """File name -> contents, rows in canonical order."""
    files = {}
    if cfg.kind == "sumprod":
        from .sumprod import rows_to_csv, rows_to_json
        files["sumprod.csv"] = rows_to_csv(results)
        js = rows_to_json(results)
    elif cfg.kind == "incidence":
        from .incidence import ST_HEADER
        rows = sorted(results, key=lambda r: (r.q, r.N))
        files["incidence.csv"] = _write_csv(ST_HEADER, [r.csv_row() for r in rows])
        js = json.dumps([{"q": r.q, "N": r.N, "generator": r.generator, "trials": r.trials,
                          "seed": r.seed, "maxI": r.max_incidences,
                          "perTrial": list(r.per_trial)} for r in rows], indent=2) + "\n"
    elif cfg.kind == "distance":
        from .distance import rows_to_csv
        files["distance.csv"] = rows_to_csv(results)
        rows = sorted(results, key=lambda r: (r.q, r.N))
        js = json.dumps([{"q": r.q, "N": r.N, "minDelta": r.min_size, "mode": r.mode,
                          "trials": r.trials, "seed": r.seed, "excludeZero": r.exclude_zero,
                          "witness": [list(p) for p in r.witness]} for r in rows], indent=2) + "\n"
    elif cfg.kind == "kakeya":
        from .kakeya import KAKEYA_HEADER
        rows = sorted(results, key=lambda r: r.q)
        files["kakeya.csv"] = _write_csv(KAKEYA_HEADER, [r.csv_row() for r in rows])
        js = json.dumps([r.as_dict() for r in rows], indent=2, sort_keys=True) + "\n"
        for r in rows:
            files[f"kakeya_assignment_q{r.q}.txt"] = "".join(
                f"{' '.join(map(str, d))} {' '.join(map(str, b))}\n"
                for d, b in sorted(r.best_assignment.items()))
    else:
        from .verify import SUITE_HEADER
        rows = sorted(results, key=lambda r: (r.q, r.name))
        files["suites.csv"] = _write_csv(SUITE_HEADER, [r.csv_row() for r in rows])
        js = json.dumps([asdict(r) for r in rows], indent=2, sort_keys=True) + "\n"
    if cfg.format == "json":
        stem = next(iter(files)).rsplit(".", 1)[0]
        files[f"{stem}.json"] = js
    return files


@dataclass
class RunManifest:
    config: dict
    config_sha256: str
    version: str
    provenance: str
    files: dict = field(default_factory=dict)
    rows: int = 0
    violations: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def run(cfg: ExperimentConfig, timing: bool = False) -> tuple[RunManifest, int]:
    """Run every cell, write result files and manifest.json; return (manifest, exit code)."""
    cells = _cells(cfg)
    n = min(_workers(), len(cells))
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            outputs = list(ex.map(_run_cell, cells))
    else:
        outputs = [_run_cell(c) for c in cells]
    results = [r for _, rs, _ in outputs for r in rs]
    files = _render(cfg, results)
    violations = sum(r.violations for r in results) if cfg.kind == "verify-all" else 0
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text)
    manifest = RunManifest(
        cfg.canonical(), cfg.digest(), __version__, PROVENANCE[cfg.kind],
        {k: hashlib.sha256(v.encode()).hexdigest() for k, v in sorted(files.items())},
        len(results), violations,
    )
    (out / "manifest.json").write_text(manifest.to_json())
    if timing:
        t = {f"q={q} size={s}": round(dt, 6) for (q, s), _, dt in outputs}
        (out / "timing.json").write_text(json.dumps(t, indent=2, sort_keys=True) + "\n")
    return manifest, EXIT_VIOLATION if violations else EXIT_OK


# ---------------------------------------------------------------------------
# plot scripts

_PLOT_SPECS = {
    "sumprod": ("n", "minMax", "min max(|A+A|, |A.A|) vs n", "q"),
    "distance": ("N", "minDelta", "min |Delta(P)| vs N", "q"),
    "incidence": ("N", "maxI", "max incidences vs N", "q"),
    "kakeya": ("q", "minSize", "smallest Besicovitch set found vs q", None),
}

_PLOT_TEMPLATE = '''"""Plot {title} from {csv_name}."""
import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
with open(here / "{csv_name}", newline="") as fh:
    rows = list(csv.DictReader(fh))

series = defaultdict(list)
for r in rows:
    series[{group}].append((float(r["{x}"]), float(r["{y}"])))

fig, ax = plt.subplots(figsize=(6, 4))
for label, pts in sorted(series.items()):
    pts.sort()
    ax.loglog([p[0] for p in pts], [p[1] for p in pts], "o-", label=label)
{extra}ax.set_xlabel("{x}")
ax.set_ylabel("{y}")
ax.set_title("{title}")
ax.legend(fontsize="small")
fig.tight_layout()
out = sys.argv[1] if len(sys.argv) > 1 else str(here / "{stem}.png")
fig.savefig(out, dpi=120)
'''

_KAKEYA_EXTRA = '''qs = sorted({float(r["q"]) for r in rows})
ax.loglog(qs, [q ** 2.5 for q in qs], "--", label="q^(5/2)")
ax.loglog(qs, [q ** 3 for q in qs], ":", label="q^3")
'''


def emit_plots(results_dir) -> list[Path]:
    """Write plot_<kind>.py next to each result CSV; returns the scripts."""
    d = Path(results_dir)
    if not d.is_dir():
        raise MissingResults(f"{d} is not a directory")
    written = []
    for kind, (x, y, title, group) in _PLOT_SPECS.items():
        csv_path = d / f"{kind}.csv"
        if not csv_path.is_file():
            continue
        with open(csv_path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if not rows:
            continue
        script = _PLOT_TEMPLATE.format(
            title=title, csv_name=csv_path.name, x=x, y=y, stem=f"plot_{kind}",
            group=f'"{group}=" + r["{group}"]' if group else '"found"',
            extra=_KAKEYA_EXTRA if kind == "kakeya" else "",
        )
        p = d / f"plot_{kind}.py"
        p.write_text(script)
        written.append(p)
    if not written:
        raise MissingResults(f"no result CSVs in {d}")
    return written


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("params", nargs="*", metavar="key=value")
    common.add_argument("--config", help="INI file; sections [experiment] and [<kind>]")
    common.add_argument("--q")
    common.add_argument("--n", dest="n")
    common.add_argument("--mode", choices=MODES)
    common.add_argument("--trials")
    common.add_argument("--seed")
    common.add_argument("--out")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--generator")
    common.add_argument("--statistic")
    common.add_argument("--exclude-zero", dest="exclude_zero", action="store_const", const="1")
    common.add_argument("--timing", action="store_true", help="also write timing.json")
    p = argparse.ArgumentParser(prog="finitecomb", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="kind", required=True)
    for k in KINDS:
        sub.add_parser(k, parents=[common])
    pl = sub.add_parser("plot")
    pl.add_argument("params", nargs="*", metavar="dir=PATH")
    pl.add_argument("--dir")
    return p


def main(argv=None) -> int:
    parser = _parser()
    try:
        # key=value words may follow flags, which a plain nargs="*" positional rejects
        args, extra = parser.parse_known_args(argv)
        stray = [w for w in extra if w.startswith("-") or "=" not in w]
        if stray:
            parser.error(f"unrecognized arguments: {' '.join(stray)}")
        args.params = list(args.params) + extra
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    try:
        if args.kind == "plot":
            raw = parse_pairs(args.params)
            d = args.dir or raw.get("dir") or raw.get("out") or "results"
            for p in emit_plots(d):
                print(p)
            return EXIT_OK
        raw = read_config_file(args.config, args.kind) if args.config else {}
        raw.update(parse_pairs(args.params))
        for k in ("q", "n", "mode", "trials", "seed", "out", "format", "generator",
                  "statistic", "exclude_zero"):
            v = getattr(args, k)
            if v is not None:
                if k == "n":
                    raw.pop("N", None)
                    raw.pop("sizes", None)
                raw[k] = v
        cfg = build_config(args.kind, raw)
        manifest, code = run(cfg, timing=args.timing)
    except (ConfigError, MissingResults) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except FiniteCombError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except AssertionError as e:
        print(f"invariant violated: {e}", file=sys.stderr)
        return EXIT_VIOLATION
    print(f"wrote {', '.join(manifest.files)} to {cfg.out} ({manifest.rows} rows)")
    if code == EXIT_VIOLATION:
        print(f"{manifest.violations} invariant violation(s)", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
