"""Experiment sweeps: centralized reference, GreeDi and baselines on paired partitions.

Configs are INI files with ``[experiment]``, ``[objective]`` and ``[dataset]``
sections, for example::

    [experiment]
    sweep = 2:50:1.0, 4:50:1.0        ; m:k:kappa_factor
    seeds = 0-9
    baselines = random_random, random_greedy, greedy_merge, greedy_max
    engine = lazy

    [objective]
    kind = exemplar

    [dataset]
    source = generate
    kind = gaussian_mixture
    params = n=10000,d=16,c=10
    normalize = true
"""
from __future__ import annotations

import configparser
import csv
import io
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from ..core import PreconditionError
from ..distributed import BASELINES, GreediConfig, baseline, exact_two_round, greedi
from ..engines import get_engine
from ..objectives import (Coverage, DPPLogDet, ExemplarObjective, GraphCut, InformationGain,
                          SEKernel, VectorDataset)
from ..partition import KEY_CENTRAL, stream
from ..verify import worst_case_instance
from . import io as dio
from .synthetic import gen_synthetic, parse_params

CSV_COLUMNS = ("method", "m", "k", "kappa", "seed", "value", "ratio", "oracle_calls", "ms", "status")
OBJECTIVES = ("exemplar", "infogain", "dpp", "cut", "coverage")
MODES = ("greedi", "exact")


@dataclass
class ExperimentConfig:
    objective: dict
    dataset: dict
    sweep: List[tuple]
    seeds: List[int]
    baselines: List[str] = field(default_factory=list)
    engine: str = "lazy"
    workers: int = 1
    local: bool = False
    mode: str = "greedi"
    central_trials: int = 10
    timing: bool = True
    out: Optional[str] = None

    def __post_init__(self):
        if not self.sweep:
            raise PreconditionError("config needs at least one sweep point")
        if not self.seeds:
            raise PreconditionError("config needs at least one seed")
        for m, k, kf in self.sweep:
            if m < 1 or k < 1 or not kf > 0:
                raise PreconditionError(f"bad sweep point {m}:{k}:{kf}")
        bad = set(self.baselines) - set(BASELINES)
        if bad:
            raise PreconditionError(f"unknown baselines: {', '.join(sorted(bad))}")
        if self.mode not in MODES:
            raise PreconditionError(f"mode must be one of {MODES}")
        get_engine(self.engine)


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise PreconditionError(f"not a boolean: {text!r}")


def _seeds(text: str) -> List[int]:
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        lo, sep, hi = part.partition("-")
        out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    return out


def _sweep(text: str) -> List[tuple]:
    pts = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        bits = part.split(":")
        if len(bits) not in (2, 3):
            raise PreconditionError(f"sweep point {part!r} is not m:k[:kappa_factor]")
        pts.append((int(bits[0]), int(bits[1]), float(bits[2]) if len(bits) == 3 else 1.0))
    return pts


def load_config(path) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if not cp.read(path):
        raise PreconditionError(f"{path}: cannot read config")
    return config_from_parser(cp)


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.read_string(text)
    return config_from_parser(cp)


def config_from_parser(cp) -> ExperimentConfig:
    for sec in ("experiment", "objective", "dataset"):
        if not cp.has_section(sec):
            raise PreconditionError(f"config is missing section [{sec}]")
    ex = cp["experiment"]
    try:
        return ExperimentConfig(
            objective=dict(cp["objective"]),
            dataset=dict(cp["dataset"]),
            sweep=_sweep(ex.get("sweep", "")),
            seeds=_seeds(ex.get("seeds", "0")),
            baselines=[b.strip() for b in ex.get("baselines", "").split(",") if b.strip()],
            engine=ex.get("engine", "lazy"),
            workers=int(ex.get("workers", "1")),
            local=_bool(ex.get("local", "false")),
            mode=ex.get("mode", "greedi"),
            central_trials=int(ex.get("central_trials", "10")),
            timing=_bool(ex.get("timing", "true")),
            out=ex.get("out"),
        )
    except ValueError as exc:
        raise PreconditionError(f"bad config value: {exc}") from exc


# ------------------------------------------------------------------ building
def load_dataset(spec: dict):
    """Dataset from a ``[dataset]`` section: generated, read from a file, or the
    adversarial coverage instance (``kind = worst_case``)."""
    source = spec.get("source", "generate")
    if spec.get("kind") == "worst_case":
        p = parse_params(spec.get("params", ""))
        return worst_case_instance(int(p.get("m", 2)), int(p.get("k", 2)))
    if source == "generate":
        ds = gen_synthetic(spec["kind"], parse_params(spec.get("params", "")),
                           int(spec.get("seed", "0")))
    elif source == "file":
        path, kind = spec["path"], spec.get("kind", "vectors")
        if kind == "vectors":
            ds = dio.load_vectors(path, spec.get("format", "csv"))
        elif kind == "graph":
            ds = dio.load_graph(path, _bool(spec.get("undirected", "false")))
        elif kind == "sets":
            ds = dio.load_sets(path)
        else:
            raise PreconditionError(f"unknown file dataset kind {kind!r}")
    else:
        raise PreconditionError(f"unknown dataset source {source!r}")
    if isinstance(ds, VectorDataset) and _bool(spec.get("normalize", "false")):
        ds = ds.normalize()
    return ds


def build_objective(kind: str, data, params: Optional[dict] = None):
    params = params or {}
    if kind not in OBJECTIVES:
        raise PreconditionError(f"unknown objective {kind!r}; choose from {', '.join(OBJECTIVES)}")
    if kind == "exemplar":
        pc = params.get("phantom_cost")
        return ExemplarObjective(data, float(params.get("alpha_exp", 2.0)),
                                 None if pc is None else float(pc),
                                 _bool(params.get("normalized", "false")))
    if kind in ("infogain", "dpp"):
        kern = SEKernel(float(params.get("h", 0.75)), float(params.get("sigma", 1.0)))
        if kind == "infogain":
            return InformationGain(data, kern)
        X = data.points
        return DPPLogDet(kern(X, X) + kern.sigma ** 2 * np.eye(X.shape[0]))
    if kind == "cut":
        return GraphCut(data)
    return Coverage(data)


# -------------------------------------------------------------------- result
@dataclass
class Row:
    method: str
    m: int
    k: int
    kappa: int
    seed: object
    value: float
    ratio: float
    oracle_calls: float
    ms: float
    status: str = "ok"

    def cells(self):
        def num(v):
            return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)
        return [self.method, str(self.m), str(self.k), str(self.kappa), str(self.seed),
                num(self.value), num(self.ratio), num(self.oracle_calls), num(self.ms), self.status]

    @classmethod
    def parse(cls, cells):
        def num(s):
            return int(s) if s.lstrip("-").isdigit() else float(s)
        method, m, k, kappa, seed, value, ratio, calls, ms, status = cells
        return cls(method, int(m), int(k), int(kappa), num(seed) if seed.isdigit() else seed,
                   float(value), float(ratio), num(calls), float(ms), status)


@dataclass
class ExperimentResult:
    rows: List[Row] = field(default_factory=list)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(r.cells())
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    def __eq__(self, other):
        return isinstance(other, ExperimentResult) and self.to_csv() == other.to_csv()

    def select(self, method=None, m=None, summary=None) -> List[Row]:
        out = []
        for r in self.rows:
            is_summary = r.seed in ("mean", "std")
            if (method is None or r.method == method) and (m is None or r.m == m) and \
                    (summary is None or summary == is_summary):
                out.append(r)
        return out

    def mean_ratio(self, method, m) -> float:
        rows = [r for r in self.select(method, m) if r.seed == "mean"]
        if not rows:
            raise KeyError((method, m))
        return rows[0].ratio


def read_csv(path_or_text) -> ExperimentResult:
    text = Path(path_or_text).read_text() if not str(path_or_text).startswith("method,") \
        else str(path_or_text)
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if tuple(header or ()) != CSV_COLUMNS:
        raise PreconditionError(f"unexpected CSV header {header}")
    return ExperimentResult([Row.parse(c) for c in reader if c])


# -------------------------------------------------------------------- runner
def _timed(fn, timing):
    t0 = time.perf_counter()
    out = fn()
    return out, ((time.perf_counter() - t0) * 1e3 if timing else 0.0)


def _central(f, k, seed, cfg):
    eng = get_engine(cfg.engine)
    if not eng.randomized:
        return eng.solve(f, None, None, k)
    sols = [eng.solve(f, None, None, k, stream(seed, KEY_CENTRAL, t)) for t in range(cfg.central_trials)]
    return float(np.mean([s.value for s in sols])), int(sum(s.oracle_calls for s in sols))


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    data = load_dataset(cfg.dataset)
    fixed = None
    if hasattr(data, "partition"):  # adversarial instance ships its own partition
        f, fixed = data.objective, data.partition
    else:
        f = build_objective(cfg.objective.get("kind", "exemplar"), data, cfg.objective)
    eng = get_engine(cfg.engine)
    res = ExperimentResult()
    central_cache = {}
    for m, k, kf in cfg.sweep:
        kappa = GreediConfig(m, k, kappa_factor=kf).budget
        per_method = {}
        for seed in cfg.seeds:
            key = (k, seed) if eng.randomized else k
            if key not in central_cache:
                out, ms = _timed(lambda: _central(f, k, seed, cfg), cfg.timing)
                central_cache[key] = (out, ms)
            out, ms = central_cache[key]
            cval, ccalls = (out.value, out.oracle_calls) if not isinstance(out, tuple) else out
            part = fixed if fixed is not None and fixed.m == m else None
            runs = [("central", lambda: None)]
            traces = []
            if cfg.mode == "exact":
                runs.append(("exact_two_round", lambda: exact_two_round(f, None, m, k, seed, part)[0]))
            else:
                gc = GreediConfig(m, k, kappa_factor=kf, engine=cfg.engine, decomposable=cfg.local,
                                  seed=seed, workers=cfg.workers)

                def run_greedi(gc=gc, part=part):
                    sol, tr = greedi(f, None, gc, part)
                    traces.append(tr)
                    return sol
                runs.append(("greedi", run_greedi))

            def run_baseline(b, part=part):
                # with kappa == k, greedy_max's machine runs are GreeDi's first round
                reuse = traces[0].machines if b == "greedy_max" and kappa == k and traces \
                    else None
                return baseline(b, f, None, m, k, seed, cfg.engine, part, cfg.local, cfg.workers,
                                machines=reuse)
            for b in cfg.baselines:
                runs.append((b, lambda b=b: run_baseline(b)))
            for method, fn in runs:
                if method == "central":
                    row = Row("central", m, k, k, seed, float(cval), 1.0 if cval else math.nan,
                              ccalls, ms)
                else:
                    try:
                        sol, t = _timed(fn, cfg.timing)
                        ratio = sol.value / cval if cval else math.nan
                        row = Row(method, m, k, kappa, seed, float(sol.value), ratio,
                                  sol.oracle_calls, t)
                    except Exception as exc:  # a failed cell is recorded, the sweep goes on
                        row = Row(method, m, k, kappa, seed, math.nan, math.nan, 0, 0.0,
                                  "error: " + str(exc).replace(",", ";").replace("\n", " "))
                res.rows.append(row)
                per_method.setdefault(method, []).append(row)
        for method, rows in per_method.items():
            ok = [r for r in rows if r.status == "ok"]
            kap = rows[0].kappa
            for stat, fn in (("mean", np.mean), ("std", np.std)):
                if ok:
                    vals = [float(fn([getattr(r, a) for r in ok])) for a in
                            ("value", "ratio", "oracle_calls", "ms")]
                else:
                    vals = [math.nan] * 4
                res.rows.append(Row(method, m, k, kap, stat, *vals, status="summary"))
    if cfg.out:
        res.to_csv(cfg.out)
    return res
