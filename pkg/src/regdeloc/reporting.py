"""Run configuration, pipelines behind each CLI command, and canonical output.

JSON is written with sorted keys and every float at 17 significant digits,
so two runs with the same :class:`RunConfig` produce identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .delocalization import (
    eigensystem,
    full_survey,
    min_support_size,
    recipe_for,
    verify_inequality_chain,
)
from .errors import OracleInconsistency
from .graph_core import generate_random_regular, girth_report, load_graph, write_edge_list
from .graph_operators import build_sphere_family, fit_condition
from .kernel_builder import amplifying_recipe, build_kernel_operator, build_recipe
from .tree_harmonics import lemma1_kernel_value, lemma1_oracle

__all__ = ["SCHEMA", "RunConfig", "RunResult", "canonical_json", "run"]

SCHEMA = 1
COMMANDS = ("gen", "girth", "condition", "spectrum", "kernel", "verify", "survey", "oracle")
ORACLE_TOL = 1e-12


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, np.generic):
        obj = obj.item()
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return "null"
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        return "%.17g" % obj
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(obj[k], indent, level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def canonical_json(obj, indent: int = 2) -> str:
    """Sorted keys, '%.17g' floats, NaN as null, infinities as strings."""
    return _encode(obj, indent, 0) + "\n"


@dataclass
class RunConfig:
    """Everything needed to reproduce a run."""

    command: str
    graph_file: str | None = None
    gen: dict | None = None
    epsilon: float = 0.3
    p: float = 1.0
    C: float | None = None
    alpha: float | None = None
    N: int | None = None
    fit: str = "tree"
    max_n: int = 12
    rotations: int = 0
    seed: int = 0
    params: dict = field(default_factory=dict)
    out: str | None = None
    csv: str | None = None
    linalg_tol: float = 1e-8
    identity_tol: float = 1e-10
    verbosity: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")

    def to_dict(self):
        return asdict(self)


@dataclass
class RunResult:
    status: int
    document: dict
    text: str = ""


def _graph(cfg: RunConfig):
    if cfg.graph_file is not None:
        return load_graph(Path(cfg.graph_file))
    if cfg.gen is not None:
        g = dict(cfg.gen)
        return generate_random_regular(int(g["n"]), int(g["d"]), int(g.get("seed", 0)))
    raise ValueError("a graph is required: pass --graph FILE or --gen n=..,d=..,seed=..")


def _param(cfg, key, cast, default=None):
    if key in cfg.params:
        return cast(cfg.params[key])
    if default is None:
        raise ValueError(f"missing parameter {key}=")
    return default


def _cmd_gen(cfg):
    spec = dict(cfg.gen or {})
    spec.update(cfg.params)
    if "n" not in spec or "d" not in spec:
        raise ValueError("gen needs n= and d=")
    g = generate_random_regular(int(spec["n"]), int(spec["d"]), int(spec.get("seed", 0)))
    text = write_edge_list(g)
    return 0, {"n": g.vertex_count, "d": g.d, "edges": len(g.edges())}, text


def _cmd_girth(cfg):
    g = _graph(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = girth_report(g, _param(cfg, "scan_limit", int, 12))
    return 0, rep.to_dict(), ""


def _cmd_condition(cfg):
    g = _graph(cfg)
    fam = build_sphere_family(g, cfg.max_n)
    if cfg.fit == "free" and cfg.C is None and cfg.alpha is None:
        fit = fit_condition(fam, cfg.p)
    else:
        fit = fit_condition(fam, cfg.p, C=cfg.C, alpha=cfg.alpha)
    return 0, fit.to_dict(), ""


def _cmd_spectrum(cfg):
    es = eigensystem(_graph(cfg))
    doc = {
        "eigenvalues": es.values.tolist(),
        "tempered": es.tempered.tolist(),
        "multiplicities": [len(b) for b in es.eigenspaces()],
        "orthonormality_error": es.orthonormality_error(),
        "max_residual": float(es.residuals().max()),
    }
    ok = doc["orthonormality_error"] <= cfg.linalg_tol and doc["max_residual"] <= cfg.linalg_tol
    return (0 if ok else 1), doc, ""


def _cmd_kernel(cfg):
    theta0 = _param(cfg, "theta0", float)
    N = _param(cfg, "N", int, cfg.N or 0)
    if N <= 0:
        raise ValueError("kernel needs N=")
    amplify = _param(cfg, "amplify", int, 0)
    recipe = (amplifying_recipe if amplify else build_recipe)(theta0, cfg.epsilon, N)
    doc = {"recipe": recipe.to_dict()}
    if cfg.graph_file is not None or cfg.gen is not None:
        op = build_kernel_operator(recipe, _graph(cfg))
        doc["norm_1_inf"] = op.norm(1.0)
        doc["operator_flags"] = list(op.flags)
    return 0, doc, ""


def _cmd_verify(cfg):
    g = _graph(cfg)
    es = eigensystem(g)
    j = _param(cfg, "j", int)
    if not 0 <= j < len(es):
        raise ValueError(f"j = {j} out of range 0..{len(es) - 1}")
    size, E = min_support_size(es.vectors[:, j], cfg.epsilon)
    recipe = recipe_for(es.points[j], cfg.epsilon, cfg.N or 1)
    rec = verify_inequality_chain(g, es, j, E, recipe, p=cfg.p)
    doc = rec.to_dict()
    doc["E"] = E.tolist()
    return (0 if rec.passed else 1), doc, ""


def _cmd_survey(cfg):
    g = _graph(cfg)
    rep = full_survey(g, cfg.epsilon, cfg.p, C=cfg.C, alpha=cfg.alpha, N=cfg.N, fit=cfg.fit,
                      max_n=cfg.max_n, rotations=cfg.rotations, seed=cfg.seed)
    if cfg.csv:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=rep.CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rep.csv_rows():
            writer.writerow({k: ("%.17g" % v if isinstance(v, float) else v)
                             for k, v in row.items()})
        Path(cfg.csv).write_text(buf.getvalue())
    doc = rep.to_dict()
    return (0 if rep.all_pass else 1), doc, ""


def _cmd_oracle(cfg):
    if not cfg.params.get("lemma1"):
        raise ValueError("oracle needs --lemma1")
    d = _param(cfg, "d", int)
    n = _param(cfg, "n", int)
    depth = _param(cfg, "depth", int, n + 2)
    method = cfg.params.get("method", "auto")
    oracle = lemma1_oracle(d, n, depth, method=method)
    rows = []
    for k in range(n + 2):
        closed = lemma1_kernel_value(d, n, k)
        seen = float(oracle.get(k, 0.0))
        rows.append({"distance": k, "closed_form": closed, "oracle": seen,
                     "abs_error": abs(closed - seen)})
    worst = max(r["abs_error"] for r in rows)
    lines = [f"{'dist':>4}  {'closed form':>24}  {'tree oracle':>24}  {'error':>9}"]
    lines += [f"{r['distance']:>4}  {r['closed_form']:>24.17g}  {r['oracle']:>24.17g}  "
              f"{r['abs_error']:>9.2e}" for r in rows]
    doc = {"d": d, "n": n, "depth": depth, "rows": rows, "max_abs_error": worst,
           "agree": worst <= ORACLE_TOL}
    return (0 if worst <= ORACLE_TOL else 1), doc, "\n".join(lines) + "\n"


_PIPELINES = {
    "gen": _cmd_gen,
    "girth": _cmd_girth,
    "condition": _cmd_condition,
    "spectrum": _cmd_spectrum,
    "kernel": _cmd_kernel,
    "verify": _cmd_verify,
    "survey": _cmd_survey,
    "oracle": _cmd_oracle,
}


def run(cfg: RunConfig) -> RunResult:
    """Execute the pipeline named by ``cfg.command``.

    Returns exit status 0 when every checked invariant holds and 1
    otherwise.  Invalid input raises ``ValueError`` (exit 2 at the CLI).
    """
    try:
        status, result, text = _PIPELINES[cfg.command](cfg)
    except OracleInconsistency as exc:
        status, result, text = 1, {"error": str(exc)}, ""
    document = {"schema": SCHEMA, "command": cfg.command, "config": cfg.to_dict(),
                "result": result, "status": status}
    if cfg.out:
        payload = text if cfg.command == "gen" else canonical_json(document)
        Path(cfg.out).write_text(payload)
    return RunResult(status, document, text)
