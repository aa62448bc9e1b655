"""Experiment front end: flat key=value configs, JSONL record emission, a
checksummed persistent memo cache, and the `verify` self-check.

Sweep cells run in a thread pool; emission is ordered by cell index so the
numeric output is identical across runs and thread counts.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from . import __version__

CACHE_ENV = "HECKE_SPECTRA_CACHE"

EXPERIMENTS = (
    "trace", "petersson", "bessel-sum", "noweight", "variance",
    "arith-sum", "discrepancy", "orbital", "verify",
)


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class ExperimentRecord:
    experiment: str
    parameters: Dict[str, object]
    outputs: Dict[str, object]
    provenance: Dict[str, object]

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "experiment": self.experiment,
                "parameters": self.parameters,
                "outputs": self.outputs,
                "provenance": self.provenance,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json_line(line: str) -> "ExperimentRecord":
        d = json.loads(line)
        return ExperimentRecord(d["experiment"], d["parameters"], d["outputs"], d["provenance"])


def _provenance(truncation: Dict[str, object]) -> Dict[str, object]:
    return {
        "tool": f"hecke-spectra {__version__}",
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
        "truncation": truncation,
    }


# ---------------------------------------------------------------------------
# persistent cache: append-only JSONL log, one sha256 per line


@dataclass(frozen=True)
class CacheEntry:
    key: Tuple[str, str]
    value: Union[Fraction, float]
    error_bound: Optional[float] = None

    @property
    def is_exact(self) -> bool:
        return isinstance(self.value, Fraction)


def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, Path.home() / ".cache" / "hecke_spectra"))


def _cache_file() -> Path:
    return cache_dir() / "memo.jsonl"


def _entry_payload(e: CacheEntry) -> dict:
    d: dict = {"key": list(e.key)}
    if e.is_exact:
        d["rational"] = str(e.value)
    else:
        d["float"] = e.value
        d["error_bound"] = e.error_bound
    return d


def _entry_from_payload(d: dict) -> CacheEntry:
    key = (d["key"][0], d["key"][1])
    if "rational" in d:
        return CacheEntry(key, Fraction(d["rational"]))
    return CacheEntry(key, float(d["float"]), d.get("error_bound"))


def _line_checksum(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


class _Cache:
    """In-memory map backed by an append-only checksummed log.  A corrupt
    line invalidates the tail: the valid prefix is rewritten and computation
    repopulates the rest (never silently trusted)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._map: Dict[Tuple[str, str], CacheEntry] = {}
        self._loaded_from: Optional[Path] = None

    def _load(self):
        path = _cache_file()
        if self._loaded_from == path:
            return
        self._map.clear()
        self._loaded_from = path
        if not path.exists():
            return
        good: List[str] = []
        dirty = False
        for line in path.read_text().splitlines():
            try:
                d = json.loads(line)
                sha = d.pop("sha")
                if sha != _line_checksum(d):
                    raise ValueError("checksum mismatch")
                e = _entry_from_payload(d)
            except (ValueError, KeyError, IndexError, TypeError):
                dirty = True
                break
            self._map[e.key] = e
            good.append(line)
        if dirty:
            path.write_text("".join(g + "\n" for g in good))

    def get(self, key: Tuple[str, str]) -> Optional[CacheEntry]:
        with self._lock:
            self._load()
            return self._map.get(key)

    def put(self, entry: CacheEntry) -> None:
        with self._lock:
            self._load()
            if entry.key in self._map:
                return
            self._map[entry.key] = entry
            path = _cache_file()
            path.parent.mkdir(parents=True, exist_ok=True)
            payload = _entry_payload(entry)
            payload["sha"] = _line_checksum(payload)
            with path.open("a") as fh:
                fh.write(json.dumps(payload, sort_keys=True) + "\n")


_CACHE = _Cache()


def cache_get(key: Tuple[str, str]) -> Optional[CacheEntry]:
    return _CACHE.get(key)


def cache_put(entry: CacheEntry) -> None:
    _CACHE.put(entry)


def _memo_float(name: str, args: str, compute: Callable[[], Tuple[float, Optional[float]]]) -> float:
    hit = cache_get((name, args))
    if hit is not None and not hit.is_exact:
        return float(hit.value)
    value, err = compute()
    cache_put(CacheEntry((name, args), float(value), err))
    return value


def _memo_fraction(name: str, args: str, compute: Callable[[], Fraction]) -> Fraction:
    hit = cache_get((name, args))
    if hit is not None and hit.is_exact:
        return hit.value
    value = compute()
    cache_put(CacheEntry((name, args), value))
    return value


def cached_class_number(D: int) -> int:
    from .class_numbers import class_number

    return int(_memo_fraction("class_number", str(D), lambda: Fraction(class_number(D).h)))


def cached_hurwitz_H(n: int) -> Fraction:
    from .class_numbers import hurwitz_H

    return _memo_fraction("hurwitz_H", str(n), lambda: hurwitz_H(n))


def cached_d_coefficient(t: int, n: int, N: int) -> float:
    from .eichler_selberg import d_coefficient

    return _memo_float("d_coefficient", f"{t},{n},{N}", lambda: (d_coefficient(t, n, N), 0.0))


def cached_bessel_j(order: int, x: float) -> float:
    from .special_functions import bessel_j

    def compute():
        b = bessel_j(order, x)
        return b.value, b.abs_error_bound

    return _memo_float("bessel_j", f"{order},{x!r}", compute)


# ---------------------------------------------------------------------------
# configuration: flat key = value lines, '#' comments


def parse_config(text: str) -> Dict[str, str]:
    cfg: Dict[str, str] = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        cfg[key.strip()] = val.strip()
    return cfg


def _int_list(cfg: Dict[str, str], key: str, default: Optional[str] = None) -> List[int]:
    """Comma-separated integers; 'a..b' expands to an inclusive range."""
    raw = cfg.get(key, default)
    if raw is None:
        raise ConfigError(f"missing required key {key!r}")
    out: List[int] = []
    for part in raw.split(","):
        part = part.strip()
        try:
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise ConfigError(f"key {key!r}: cannot parse {part!r} as integer or range")
    return out


def _float_list(cfg: Dict[str, str], key: str, default: Optional[str] = None) -> List[float]:
    raw = cfg.get(key, default)
    if raw is None:
        raise ConfigError(f"missing required key {key!r}")
    try:
        return [float(p) for p in raw.split(",")]
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot parse {raw!r} as floats")


def _float_scalar(cfg: Dict[str, str], key: str, default: Optional[str] = None) -> float:
    vals = _float_list(cfg, key, default)
    if len(vals) != 1:
        raise ConfigError(f"key {key!r}: expected a single number")
    return vals[0]


# ---------------------------------------------------------------------------
# sweep execution: work pool + emission ordered by cell index


def _run_cells(cells: Sequence[dict], work: Callable[[dict], Tuple[dict, dict]],
               experiment: str, threads: int) -> List[ExperimentRecord]:
    def one(cell):
        outputs, truncation = work(cell)
        return ExperimentRecord(experiment, cell, outputs, _provenance(truncation))

    if threads <= 1:
        return [one(c) for c in cells]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, cells))


# ---------------------------------------------------------------------------
# experiment drivers


def _exp_trace(cfg, threads):
    from .eichler_selberg import trace_full, trace_new

    kind = cfg.get("kind", "new")
    if kind not in ("new", "full"):
        raise ConfigError("trace: kind must be 'new' or 'full'")
    fn = trace_new if kind == "new" else trace_full
    cells = [
        {"n": n, "k": k, "N": N, "kind": kind}
        for N in _int_list(cfg, "N", "1")
        for k in _int_list(cfg, "k", "12")
        for n in _int_list(cfg, "n")
        if math.gcd(n, N) == 1
    ]

    def work(cell):
        tb = fn(cell["n"], cell["k"], cell["N"])
        outputs = {
            "total": tb.total,
            "term1": float(tb.term1), "term2": tb.term2,
            "term3": float(tb.term3), "term4": float(tb.term4),
        }
        return outputs, {"mode": "exact identity, no truncation"}

    return _run_cells(cells, work, "trace", threads)


def _exp_petersson(cfg, threads):
    from .petersson import delta_full, delta_new

    kind = cfg.get("kind", "full")
    fn = delta_full if kind == "full" else delta_new
    m = _int_list(cfg, "m", "1")
    cells = [
        {"k": k, "N": N, "m": mm, "n": n, "kind": kind}
        for N in _int_list(cfg, "N", "1")
        for k in _int_list(cfg, "k", "12")
        for mm in m
        for n in _int_list(cfg, "n")
    ]

    def work(cell):
        r = fn(cell["k"], cell["N"], cell["m"], cell["n"])
        return (
            {"value": r.value, "truncation_bound": r.truncation_bound},
            {"c_max": r.c_max, "l_max": r.l_max, "tail_bound": r.truncation_bound},
        )

    return _run_cells(cells, work, "petersson", threads)


def _exp_bessel_sum(cfg, threads):
    from .special_functions import weighted_bessel_order_sum

    K = _float_scalar(cfg, "K")
    delta = _float_scalar(cfg, "delta", "0.3")
    cells = [{"K": K, "delta": delta, "x": x} for x in _float_list(cfg, "x")]

    def work(cell):
        s = weighted_bessel_order_sum(cell["K"], cell["delta"], cell["x"])
        return {"sum": s}, {"order_window": [K - K ** delta, K + K ** delta]}

    return _run_cells(cells, work, "bessel-sum", threads)


def _exp_noweight(cfg, threads):
    from .eichler_selberg import WindowSpec, averaged_trace_window, noweight_main_term

    delta = _float_scalar(cfg, "delta", "0.25")
    cells = [
        {"n": n, "N": N, "delta": delta}
        for N in _int_list(cfg, "N", "1")
        for n in _int_list(cfg, "n")
    ]

    def work(cell):
        n = cell["n"]
        K = int(4.0 * math.pi * math.sqrt(n))
        spec = WindowSpec(float(K), cell["delta"], 1.0, K ** cell["delta"])
        lhs = averaged_trace_window(n, cell["N"], spec)
        main = noweight_main_term(n, cell["N"], K)
        ratio = lhs / main if main != 0.0 else math.inf
        return (
            {"K": K, "lhs": lhs, "main_term": main, "ratio": ratio},
            {"weight_window_halfwidth": K ** cell["delta"]},
        )

    return _run_cells(cells, work, "noweight", threads)


def _exp_variance(cfg, threads):
    from .eichler_selberg import diagonal_side, variance_window

    cells = []
    for N in _int_list(cfg, "N", "2,3,5,6"):
        for n in _int_list(cfg, "n"):
            if math.gcd(n, N) != 1:
                continue
            T = float(cfg["T"]) if "T" in cfg else 2.0 * math.ceil(math.sqrt(n))
            cells.append({"n": n, "N": N, "T": T})

    def work(cell):
        v = variance_window(cell["n"], cell["N"], cell["T"])
        d = diagonal_side(cell["n"], cell["N"], cell["T"])
        return (
            {"variance": v, "diagonal": d, "difference": v - d,
             "scaled_difference": (v - d) / cell["n"] ** 0.6},
            {"phi_tail_target": 1e-8},
        )

    return _run_cells(cells, work, "variance", threads)


def _exp_arith_sum(cfg, threads):
    from .class_numbers import admissible_n0, count_A

    cells = [
        {"n": n, "N": N}
        for N in _int_list(cfg, "N", "2,3,5,6")
        for n in _int_list(cfg, "n")
        if n % 2 == 1 and math.gcd(n, N) == 1
    ]

    def work(cell):
        n, N = cell["n"], cell["N"]
        tmax = math.isqrt(4 * n - 1)
        dsum = math.fsum(
            cached_d_coefficient(t, n, N) ** 2 for t in range(-tmax, tmax + 1)
        )
        outputs = {"d_square_sum": dsum, "normalized": dsum / math.sqrt(n)}
        n0 = admissible_n0(N, n)
        outputs["n0"] = n0
        outputs["a_count_ratio"] = count_A(N, n, n0) / n if n0 is not None else None
        return outputs, {"t_range": [-tmax, tmax]}

    return _run_cells(cells, work, "arith-sum", threads)


def _exp_discrepancy(cfg, threads):
    from .spectral import (chebyshev_moment, discrepancy, empirical_mu_star,
                           plancherel_measure, trace_discrepancy_bound)

    cells = [
        {"k": k, "N": N, "p": p}
        for N in _int_list(cfg, "N", "1")
        for k in _int_list(cfg, "k")
        for p in _int_list(cfg, "p", "2")
        if math.gcd(p, N) == 1
    ]

    def work(cell):
        k, N, p = cell["k"], cell["N"], cell["p"]
        mu = empirical_mu_star(k, N, p)
        ref = plancherel_measure(p)
        outputs = {
            "dim": len(mu.atoms),
            "atoms": list(mu.atoms),
            "discrepancy_vs_plancherel": discrepancy(mu, ref),
            "moment2_gap": chebyshev_moment(mu, 2) - chebyshev_moment(ref, 2),
            "trace_bound_at_p": trace_discrepancy_bound(p, k, N),
        }
        return outputs, {"newton_digits": 40}

    return _run_cells(cells, work, "discrepancy", threads)


def _exp_orbital(cfg, threads):
    from .petersson import orbital_integral_A

    cells = [
        {"k": k, "t": t}
        for k in _int_list(cfg, "k", "12,24,48")
        for t in _float_list(cfg, "t", "0.5,1,2")
    ]

    def work(cell):
        quad, closed = orbital_integral_A(cell["t"], cell["k"])
        rel = abs(quad - closed) / abs(closed) if closed != 0 else math.inf
        return (
            {"quadrature_re": quad.real, "quadrature_im": quad.imag,
             "closed_form": closed.real, "relative_error": rel},
            {"refinement_tolerance": 1e-7},
        )

    return _run_cells(cells, work, "orbital", threads)


# ---------------------------------------------------------------------------
# verify: deterministic self-checks (quick) or the full acceptance suite


def _verify_checks() -> List[Tuple[str, dict, float, float]]:
    """(name, parameters, observed, tolerance) with observed <= tolerance on
    a healthy build.  A deterministic subset of the acceptance suite, cheap
    enough to run repeatedly for cache and threading validation."""
    from .class_numbers import r3, r3_from_hurwitz
    from .eichler_selberg import diagonal_side, trace_new, variance_window
    from .kloosterman import kloosterman_sum, weil_bound
    from .oracles import delta_tau, genus_X0
    from .petersson import delta_full, orbital_integral_A
    from .spectral import trace_discrepancy_bound

    checks = []
    tau = delta_tau(60)
    err = max(abs(trace_new(n, 12, 1).total - tau.a(n) / n ** 5.5) for n in range(1, 51))
    checks.append(("trace_tau_n_le_50", {"k": 12, "N": 1}, err, 1e-9))

    genus_err = max(
        abs(float(trace_new(1, 2, N).total) - genus_X0(N)) for N in (11, 14, 15, 23, 26, 35)
    )
    checks.append(("weight2_genus", {}, genus_err, 1e-12))

    r1 = delta_full(12, 1, 1, 1)
    r2 = delta_full(12, 1, 1, 2)
    checks.append(
        ("petersson_rank_one_n2", {"k": 12},
         abs(r2.value / r1.value - tau.a(2) / 2 ** 5.5), 1e-6)
    )

    werr = 0.0
    for (m, n, c) in [(1, 1, 100), (3, 7, 241), (5, 12, 2048), (2, 9, 1155)]:
        s = kloosterman_sum(m, n, c)
        werr = max(werr, abs(s.value) - weil_bound(m, n, c))
    checks.append(("weil_bound_sample", {}, werr, 0.0))

    r3err = max(abs(r3(n) - r3_from_hurwitz(n)) for n in range(1, 201))
    checks.append(("gauss_three_squares", {"n_max": 200}, r3err, 0.0))

    vdiff = abs(variance_window(15, 2, 8.0) - diagonal_side(15, 2, 8.0))
    checks.append(("variance_identity_n15", {"n": 15, "N": 2, "T": 8}, vdiff, 10 * 15 ** 0.6))

    quad, closed = orbital_integral_A(1.0, 12)
    checks.append(
        ("orbital_k12_t1", {}, abs(quad - closed) / abs(closed), 1e-6)
    )

    tdb = trace_discrepancy_bound(2, 12, 1)
    checks.append(
        ("trace_discrepancy_bound", {"n": 2, "k": 12, "N": 1},
         abs(tdb - abs(tau.a(2)) / 2 ** 5.5 / 2.0), 1e-9)
    )
    return checks


def _exp_verify(cfg, threads):
    scope = cfg.get("scope", "quick")
    if scope == "full":
        import pytest

        tests = Path(__file__).resolve().parents[2] / "tests" / "test_acceptance.py"
        code = pytest.main(["-q", str(tests)])
        rec = ExperimentRecord(
            "verify", {"scope": "full"}, {"pytest_exit_code": int(code)},
            _provenance({"mode": "acceptance suite"}),
        )
        return [rec]
    if scope != "quick":
        raise ConfigError("verify: scope must be 'quick' or 'full'")

    checks = {name: (observed, tol) for name, _, observed, tol in _verify_checks()}

    def work(cell):
        observed, tol = checks[cell["check"]]
        return (
            {"observed": observed, "tolerance": tol, "ok": observed <= tol},
            {"mode": "quick self-check"},
        )

    cells = [{"check": name} for name in checks]
    return _run_cells(cells, work, "verify", threads)


_DRIVERS = {
    "trace": _exp_trace,
    "petersson": _exp_petersson,
    "bessel-sum": _exp_bessel_sum,
    "noweight": _exp_noweight,
    "variance": _exp_variance,
    "arith-sum": _exp_arith_sum,
    "discrepancy": _exp_discrepancy,
    "orbital": _exp_orbital,
    "verify": _exp_verify,
}


def run_experiment(name: str, config: Dict[str, str], threads: int = 1) -> List[ExperimentRecord]:
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {EXPERIMENTS}")
    return _DRIVERS[name](config, threads)


# ---------------------------------------------------------------------------
# emission


def _write_csv(records: List[ExperimentRecord], path: Path) -> None:
    keys_p: List[str] = []
    keys_o: List[str] = []
    for r in records:
        for k in r.parameters:
            if k not in keys_p:
                keys_p.append(k)
        for k in r.outputs:
            if k not in keys_o:
                keys_o.append(k)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["experiment"] + keys_p + keys_o)
        for r in records:
            w.writerow(
                [r.experiment]
                + [r.parameters.get(k, "") for k in keys_p]
                + [r.outputs.get(k, "") for k in keys_o]
            )


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = argparse.ArgumentParser(
        prog="hecke-spectra",
        description="Trace-formula experiment sweeps; records are emitted as JSON lines.",
    )
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", help="flat key = value config file")
    ap.add_argument("--out", help="also write JSONL records to this file")
    ap.add_argument("--csv", help="also write a flat CSV to this file")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)

    try:
        cfg: Dict[str, str] = {}
        if args.config:
            cfg = parse_config(Path(args.config).read_text())
        if "experiment" in cfg and cfg["experiment"] != args.experiment:
            raise ConfigError(
                f"config names experiment {cfg['experiment']!r} but "
                f"{args.experiment!r} was requested"
            )
        threads = args.threads if args.threads else int(cfg.get("threads", "1"))
        records = run_experiment(args.experiment, cfg, threads)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    lines = [r.to_json_line() for r in records]
    for line in lines:
        print(line)
    out = args.out or cfg.get("out")
    if out:
        Path(out).write_text("".join(line + "\n" for line in lines))
    csv_path = args.csv or cfg.get("csv")
    if csv_path:
        _write_csv(records, Path(csv_path))

    if args.experiment == "verify":
        ok = all(
            r.outputs.get("ok", r.outputs.get("pytest_exit_code", 1) == 0)
            for r in records
        )
        return 0 if ok else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
