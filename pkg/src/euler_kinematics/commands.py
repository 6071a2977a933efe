"""Command dispatch and report emission.

A report is a list of rows ``(name, i, k, l, value, se, residual)`` plus
echoed inputs and any output objects.  Output bytes depend only on the
scene and the config: wall time is kept on the Report object but is only
written when explicitly requested.
"""
import csv
from dataclasses import dataclass, field
import io
import math
import time

import numpy as np

from .cf import PolytopeCombination, euler_integral
from .core import from_polytopes
from .errors import ValidationError
from .ops import convolve, pushforward
from .scenes import SCHEMA, SPHERE3, dumps, encode_object, fmt_float, scene_to_dict
from .sphere3 import (BallCF, convolve_balls, crofton_valuation, default_grid, nu_exact,
                      recover_d, table_tensor, verify_m_table)
from .valuations import evaluate_valuation, flat_kinematic_tensor, rotation_average_convolution

COLUMNS = ("name", "i", "k", "l", "value", "se", "residual")
COMMANDS = ("integrate", "convolve", "pushforward", "valuations", "kinematic-flat",
            "crofton", "verify-s3", "recover-s3")
CHECK_COMMANDS = ("verify-s3", "recover-s3")

_DEFAULT_TOL = {"verify-s3": 1e-10, "recover-s3": 1e-6}


@dataclass
class RunConfig:
    seed: int = 0
    samples: int = 1000
    grid: tuple = (20, 20, math.pi / 4)
    tolerance: float = None
    output_format: str = "csv"
    workers: int = 1

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        if int(self.samples) <= 0:
            raise ValidationError("samples must be positive")
        nr, ns, rmax = self.grid
        if int(nr) <= 0 or int(ns) <= 0 or not rmax > 0:
            raise ValidationError("grid needs positive counts and r_max")
        self.grid = (int(nr), int(ns), float(rmax))
        if self.tolerance is not None and not self.tolerance > 0:
            raise ValidationError("tolerance must be positive")
        if self.output_format not in ("csv", "json"):
            raise ValidationError(f"unknown format {self.output_format!r}")

    def tol_for(self, command):
        return self.tolerance if self.tolerance is not None else _DEFAULT_TOL.get(command)


@dataclass
class Report:
    command: str
    config: RunConfig
    inputs: dict
    rows: list = field(default_factory=list)
    outputs: dict = field(default_factory=dict)
    passed: bool = True
    wall_time: float = 0.0

    def add(self, name, i=None, k=None, l=None, value=None, se=None, residual=None):
        self.rows.append((name, i, k, l, value, se, residual))

    def to_dict(self, timing=False):
        c = self.config
        out = {
            "schema": SCHEMA,
            "command": self.command,
            "config": {"seed": int(c.seed), "samples": int(c.samples),
                       "grid": [c.grid[0], c.grid[1], c.grid[2]],
                       "tolerance": c.tol_for(self.command)},
            "inputs": self.inputs,
            "results": [dict(zip(COLUMNS, (_num(v) for v in row))) for row in self.rows],
            "passed": self.passed,
        }
        if self.outputs:
            out["outputs"] = self.outputs
        if timing:
            out["wall_time"] = self.wall_time
        return out


def _num(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def report_text(report, fmt, timing=False):
    if fmt == "json":
        return dumps(report.to_dict(timing))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in report.rows:
        w.writerow([_cell(_num(v)) for v in row])
    return buf.getvalue()


def write_report(report, path, fmt="csv", timing=False):
    text = report_text(report, fmt, timing)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# -- commands -------------------------------------------------------------------------

def _euclidean(scene, command):
    if scene.space == SPHERE3:
        raise ValidationError(f"{command} needs a euclidean scene")


def _sphere(scene, command):
    if scene.space != SPHERE3:
        raise ValidationError(f"{command} needs a sphere3 scene")


def _pair(scene, command):
    names = list(scene.objects)
    if len(names) < 2:
        raise ValidationError(f"{command} needs two objects")
    return names[0], names[1]


def _integrate(scene, config, rep):
    for name, obj in scene.objects.items():
        if isinstance(obj, BallCF):
            rep.add(name, value=sum(w for w, _ in obj.terms))
        else:
            rep.add(name, value=int(euler_integral(obj)))


def _convolve(scene, config, rep):
    a, b = _pair(scene, "convolve")
    A, B = scene.objects[a], scene.objects[b]
    name = f"{a}*{b}"
    if scene.space == SPHERE3:
        out = convolve_balls(A, B)
        rep.add(name, value=sum(w for w, _ in out.terms))
    else:
        out = convolve(A, B)
        rep.add(name, value=int(euler_integral(out)))
    rep.outputs[name] = encode_object(out)


def _pushforward(scene, config, rep):
    _euclidean(scene, "pushforward")
    if not scene.maps:
        raise ValidationError("pushforward needs at least one map in the scene")
    for mname, f in scene.maps.items():
        for name, obj in scene.objects.items():
            if isinstance(obj, PolytopeCombination):
                obj = from_polytopes(obj)
            out = pushforward(obj, f)
            key = f"{mname}({name})"
            rep.add(key, value=int(euler_integral(out)))
            rep.outputs[key] = encode_object(out)


def _valuations(scene, config, rep):
    _euclidean(scene, "valuations")
    for name, obj in scene.objects.items():
        cache = {}
        for k in range(scene.dim + 1):
            rep.add(name, i=k, value=float(evaluate_valuation(k, obj, cache)))


def _kinematic_flat(scene, config, rep):
    _euclidean(scene, "kinematic-flat")
    n = scene.dim
    if n not in (2, 3):
        raise ValidationError("kinematic-flat runs in R^2 or R^3")
    a, b = _pair(scene, "kinematic-flat")
    A, B = scene.objects[a], scene.objects[b]
    count, _, rmax = config.grid
    T = flat_kinematic_tensor(n, count=max(count, n + 2), r_max=rmax)
    va = np.array([evaluate_valuation(k, A) for k in range(n + 1)])
    vb = np.array([evaluate_valuation(k, B) for k in range(n + 1)])
    for i, k, l, c in T.rows():
        rep.add("c", i, k, l, value=c, residual=T.residual)
    for i in range(n + 1):
        est, se, _ = rotation_average_convolution(A, B, i, config.samples, config.seed,
                                                  workers=config.workers)
        rhs = T.apply(i, va, vb)
        rep.add(f"{a}+{b}", i=i, value=est, se=se, residual=est - rhs)


def _crofton(scene, config, rep):
    _sphere(scene, "crofton")
    for name, obj in scene.objects.items():
        for i in range(4):
            est, se = crofton_valuation(i, obj, config.samples, config.seed,
                                        workers=config.workers, tag=f"crofton/{name}")
            rep.add(name, i=i, value=est, se=se, residual=est - nu_exact(i, obj))


def _grid(config):
    nr, ns, rmax = config.grid
    if rmax > math.pi / 4 + 1e-15:
        raise ValidationError("sphere grids need r_max <= pi/4 so that r + s <= pi/2")
    return default_grid(nr, ns, rmax)


def _verify_s3(scene, config, rep):
    res = verify_m_table(_grid(config))
    tol = config.tol_for("verify-s3")
    for i, r in enumerate(res):
        rep.add("m_table", i=i, residual=float(r))
    rep.passed = bool(np.all(res <= tol))


def _recover_s3(scene, config, rep):
    T = recover_d(_grid(config))
    ref = table_tensor()
    for i, k, l, c in T.rows():
        rep.add("d", i, k, l, value=c, residual=abs(c - ref[i, k, l]))
    rep.add("lstsq", residual=T.residual)
    tol = config.tol_for("recover-s3")
    rep.passed = bool(np.abs(T.entries - ref).max() <= tol)


_DISPATCH = {
    "integrate": _integrate,
    "convolve": _convolve,
    "pushforward": _pushforward,
    "valuations": _valuations,
    "kinematic-flat": _kinematic_flat,
    "crofton": _crofton,
    "verify-s3": _verify_s3,
    "recover-s3": _recover_s3,
}


def run(command, scene, config):
    """Execute ``command`` on ``scene``; scene may be None for verify/recover runs."""
    fn = _DISPATCH.get(command)
    if fn is None:
        raise ValidationError(f"unknown command {command!r}")
    if scene is None and command not in CHECK_COMMANDS:
        raise ValidationError(f"{command} needs a scene")
    inputs = scene_to_dict(scene) if scene is not None else {}
    rep = Report(command, config, inputs)
    t0 = time.perf_counter()
    fn(scene, config, rep)
    rep.wall_time = time.perf_counter() - t0
    return rep
