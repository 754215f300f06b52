"""Subcommand drivers: each returns an exit code plus a JSON-ready payload."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import brauer, ps_jh
from .exact_modules import (
    BoundViolated, ModuleError, RepSpace, filtration_dot, level_cells, theta_filtration,
    verify_intersection, verify_iso1, verify_projective, verify_ses_and_split,
)
from .gf_core import FieldError, field_build
from .report import Report
from .weight_algebra import PartialResult, TensorTerm, Weight, WeightError, WeightSum, decompose

__all__ = [
    "SCHEMA", "DEFAULT_SEED", "EXIT_OK", "EXIT_CONFIG", "EXIT_PARTIAL", "EXIT_FAIL",
    "ConfigError", "RunConfig", "Report", "Outcome",
    "cmd_decompose", "cmd_filtration", "cmd_jh", "cmd_verify", "run",
]

SCHEMA = "thetarep-report-v1"
DEFAULT_SEED = 20240501
EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL, EXIT_FAIL = 0, 1, 2, 3
TARGETS = ("cg", "ses", "projective", "iso1", "intersection", "all")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    p: int
    f: int = 1
    r: tuple[int, ...] | None = None
    m: tuple[int, ...] | None = None
    n: tuple[int, ...] | None = None
    k: int | None = None
    target: str = "all"
    out: Path | None = None
    json_path: str | None = None
    dot_dir: Path | None = None
    seed: int = DEFAULT_SEED
    force: bool = False
    conjectural: bool = False
    verbose: int = 0

    @property
    def level(self) -> int:
        """``--m`` read as a single filtration depth."""
        if self.m is None or len(self.m) != 1:
            raise ConfigError("--m must be a single integer here")
        return self.m[0]

    def validate(self) -> None:
        try:
            field_build(self.p, self.f)
        except FieldError as exc:
            raise ConfigError(str(exc)) from exc
        if self.command in ("decompose",):
            self._need("m", "n")
            self._same_length("m", "n")
        if self.command == "filtration":
            self._need("r", "m")
            self._same_length("r")
            if self.level < 0:
                raise ConfigError("--m must be >= 0")
        if self.command == "jh":
            self._need("r")
            if len(self.r) != 1:
                raise ConfigError("jh takes a single integer --r")
        if self.command == "verify" and self.target not in TARGETS:
            raise ConfigError(f"unknown target {self.target!r}; choose from {', '.join(TARGETS)}")
        for name in ("r", "m", "n"):
            val = getattr(self, name)
            if val is not None and any(x < 0 for x in val):
                raise ConfigError(f"--{name} entries must be >= 0")

    def _need(self, *names: str) -> None:
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(f"{self.command} needs --{name}")

    def _same_length(self, *names: str) -> None:
        for name in names:
            val = getattr(self, name)
            if val is not None and len(val) != self.f:
                raise ConfigError(f"--{name} needs {self.f} entries, got {len(val)}")

    def to_json(self) -> dict:
        return {"command": self.command, "p": self.p, "f": self.f,
                "r": None if self.r is None else list(self.r),
                "m": None if self.m is None else list(self.m),
                "n": None if self.n is None else list(self.n),
                "k": self.k, "target": self.target, "seed": self.seed,
                "force": self.force, "conjectural": self.conjectural}


@dataclass
class Outcome:
    code: int
    lines: list[str]
    payload: dict
    dots: dict[str, str] = field(default_factory=dict)

    def document(self, config: RunConfig) -> dict:
        spec = field_build(config.p, config.f)
        return {"schema": SCHEMA, "config": config.to_json(), "field": spec.to_json(),
                "exit_code": self.code, **self.payload}


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- decompose -------------------------------------------------------------------

def _character_check(m, n, result, spec) -> bool:
    lhs = brauer.char_table(TensorTerm.of(m, n), spec)
    rhs_terms = result.done.terms + result.residual.terms if isinstance(result, PartialResult) else result.terms
    rhs = brauer.char_table(WeightSum(rhs_terms, spec.q), spec)
    return bool(np.array_equal(lhs, rhs))


def cmd_decompose(config: RunConfig) -> Outcome:
    spec = field_build(config.p, config.f)
    res = decompose(config.m, config.n, config.p)
    lhs = f"{Weight(config.m)}⊗{Weight(config.n)}"
    if isinstance(res, PartialResult):
        lines = [f"{lhs} = {res.pretty()}", "partial: no rule applies to the bracketed terms"]
        lines += [f"  note: {x}" for x in res.notes]
        return Outcome(EXIT_PARTIAL, lines, {"partial": True, "result": res.to_json(), "dim": res.dim})
    return Outcome(EXIT_OK, [f"{lhs} = {res.pretty()}"],
                   {"partial": False, "result": res.to_json(), "dim": res.dim})


# -- filtration ------------------------------------------------------------------

def cmd_filtration(config: RunConfig) -> Outcome:
    spec = field_build(config.p, config.f)
    m = config.level
    filt = theta_filtration(spec, config.r, m, force=config.force)
    q = spec.q
    reports, lines = [], []
    for cell in filt.cells:
        if all(x >= q for x in cell.r_prime):
            rep = verify_iso1(spec, filt.r, cell.j, cell.level)
        else:
            rep = Report("iso1", "principal series sub-quotient of the theta filtration",
                         {"p": spec.p, "f": spec.f, "r": filt.r, "j": cell.j},
                         {"dim": q + 1}, {"dim": cell.dim}, cell.dim == q + 1,
                         {"skipped": f"r' = {cell.r_prime} has an entry below q"})
        reports.append(rep)
        lines.append(f"cell j={cell.j} S={cell.S} r'={cell.r_prime} dim {cell.dim}: "
                     f"{'PASS' if rep.passed else 'FAIL'}")
    ok_total = filt.total_dim == filt.expected_total
    lines.append(f"dim = (m+1)^f(q+1) = {filt.expected_total}, computed {filt.total_dim}: "
                 f"{'PASS' if ok_total else 'FAIL'}")
    dots = {"filtration": filtration_dot(filt)}
    if m >= 1 and not config.force:
        dots["hypercube"] = ps_jh.hypercube_vx(filt.r, spec.p, 1).to_dot(
            f"hypercube_r{'_'.join(map(str, filt.r))}")
    passed = ok_total and all(r.passed for r in reports)
    payload = {
        "cells": [c.to_json() for c in filt.cells],
        "total_dim": filt.total_dim,
        "expected_total": filt.expected_total,
        "reports": [r.to_json() for r in reports],
        "pass": passed,
    }
    return Outcome(EXIT_OK if passed else EXIT_FAIL, lines, payload, dots)


# -- jh --------------------------------------------------------------------------

def cmd_jh(config: RunConfig) -> Outcome:
    p, f = config.p, config.f
    res = ps_jh.jh_factors(config.r[0], p, f)
    lines = [f"ind(d^{config.r[0]}) over F_{p ** f}, digits a = {res.a}"]
    if not res.generic:
        lines.append("warning: non-generic exponent, factor list not guaranteed")
    for x in res.factors:
        lines.append(f"  S={sorted(x.lam.subset)} λ={x.lam}: {x.pretty()}  dim {x.dim}  [{x.provenance}]")
    lines.append(f"total dim {res.dim} (q+1 = {p ** f + 1})")
    lines += [f"note: {x}" for x in res.notes]
    g = ps_jh.hypercube(f)
    for v in g.vertices:
        g.labels[v] = ps_jh.lambda_for_subset(v, f)
    payload = {"jh": res.to_json(), "hypercube": g.to_json()}
    dots = {"jh_socle": ps_jh.jh_socle_dot(res), "hypercube": g.to_dot(f"lambda_hypercube_f{f}")}
    if config.conjectural:
        if f != 2:
            lines.append("warning: the conjectural grouping is only defined for f = 2")
        else:
            try:
                diamonds = ps_jh.conjectural_f2_grouping(res.a[0], res.a[1], p)
            except ps_jh.NonGeneric as exc:
                lines.append(f"warning: {exc}")
            else:
                lines.append("CONJECTURAL grouping (not verified):")
                for d in diamonds:
                    lines.append("  " + " / ".join(f"({w[0]},{w[1]})⊗D^{e}" for w, e in d.nodes()))
                payload["conjectural"] = {"watermark": "CONJECTURAL", "diamonds": [d.to_json() for d in diamonds]}
                dots["conjectural"] = ps_jh.conjectural_dot(diamonds, p)
    return Outcome(EXIT_OK, lines, payload, dots)


# -- verify ----------------------------------------------------------------------

def _verify_cg(config: RunConfig) -> list[Report]:
    spec = field_build(config.p, config.f)
    res = decompose(config.m, config.n, config.p)
    expected_dim = Weight(config.m).dim * Weight(config.n).dim
    char_ok = _character_check(config.m, config.n, res, spec)
    return [Report("cg", "tensor product decomposition",
                   {"p": config.p, "f": config.f, "m": config.m, "n": config.n},
                   {"dim": expected_dim, "character_equal": True},
                   {"dim": res.dim, "character_equal": char_ok, "partial": isinstance(res, PartialResult)},
                   res.dim == expected_dim and char_ok,
                   {"result": res.to_json()})]


def _verify_ses(config: RunConfig) -> list[Report]:
    spec = field_build(config.p, config.f)
    blocks = [i for i, x in enumerate(config.n) if x]
    if len(blocks) != 1:
        raise ConfigError("ses needs --n with exactly one nonzero block")
    i = blocks[0]
    return [verify_ses_and_split(spec, config.m, i, config.n[i])]


def _verify_projective(config: RunConfig) -> list[Report]:
    spec = field_build(config.p, config.f)
    return [verify_projective(spec, config.m, config.k, seed=config.seed)]


def _verify_iso1(config: RunConfig) -> list[Report]:
    spec = field_build(config.p, config.f)
    m = config.level
    out = []
    for lvl in range(m + 1):
        for j in level_cells(spec.f, lvl):
            out.append(verify_iso1(spec, config.r, j, lvl))
    return out


def _verify_intersection(config: RunConfig) -> list[Report]:
    spec = field_build(config.p, config.f)
    m = config.level
    ok = verify_intersection(spec, config.r, m)
    return [Report("intersection", "theta-power intersection identity",
                   {"p": config.p, "f": config.f, "r": config.r, "m": m},
                   True, ok, ok)]


_TARGETS: dict[str, tuple[tuple[str, ...], Callable[[RunConfig], list[Report]]]] = {
    "cg": (("m", "n"), _verify_cg),
    "ses": (("m", "n"), _verify_ses),
    "projective": (("m", "k"), _verify_projective),
    "iso1": (("r", "m"), _verify_iso1),
    "intersection": (("r", "m"), _verify_intersection),
}


def _applicable(target: str, config: RunConfig) -> bool:
    """Whether ``--target all`` should run this target with the given options."""
    need, _ = _TARGETS[target]
    if any(getattr(config, x) is None for x in need):
        return False
    if target in ("iso1", "intersection"):
        return len(config.m) == 1 and len(config.r) == config.f
    return all(len(getattr(config, x)) == config.f for x in ("m", "n") if x in need)


def cmd_verify(config: RunConfig) -> Outcome:
    if config.target == "all":
        chosen = [t for t in _TARGETS if _applicable(t, config)]
        if not chosen:
            raise ConfigError("verify --target all found no target whose options are all given")
    else:
        need, _ = _TARGETS[config.target]
        for x in need:
            if getattr(config, x) is None:
                raise ConfigError(f"target {config.target} needs --{x}")
        chosen = [config.target]
    reports: list[Report] = []
    for t in chosen:
        t0 = time.perf_counter()
        batch = _TARGETS[t][1](config)
        for r in batch:
            r.timing = time.perf_counter() - t0
        reports.extend(batch)
    reports.sort(key=lambda r: r.claim)
    lines = []
    for r in reports:
        if r.claim == "ses":
            exact = "PASS" if r.computed["exact"] else "FAIL"
            split = "SPLIT" if r.computed["split"] else "NOT-SPLIT"
            agree = "matches" if r.computed["split"] == r.expected["split"] else "contradicts"
            lines.append(f"[{'PASS' if r.passed else 'FAIL'}] ses: exact: {exact}, split: {split} ({agree} Lucas)")
        else:
            lines.append(r.line())
    passed = all(r.passed for r in reports)
    payload = {"seed": config.seed, "reports": [r.to_json() for r in reports], "pass": passed}
    return Outcome(EXIT_OK if passed else EXIT_FAIL, lines, payload)


COMMANDS = {"decompose": cmd_decompose, "filtration": cmd_filtration, "jh": cmd_jh, "verify": cmd_verify}


def run(config: RunConfig, echo: Callable[[str], None] = print) -> int:
    """Validate, dispatch, print and write outputs; returns the exit code."""
    try:
        config.validate()
        outcome = COMMANDS[config.command](config)
    except (ConfigError, BoundViolated, WeightError, FieldError) as exc:
        echo(f"error: {exc}")
        return EXIT_CONFIG
    except ModuleError as exc:
        echo(f"error: {exc}")
        return EXIT_CONFIG
    for line in outcome.lines:
        echo(line)
    doc = outcome.document(config)
    json_path = config.json_path
    if json_path is None and config.command == "verify":
        json_path = str((config.out or Path(".")) / "verify_report.json")
    if json_path == "-":
        echo(_dump(doc).rstrip("\n"))
    elif json_path is not None:
        path = Path(json_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(_dump(doc), encoding="utf-8")
    if config.dot_dir is not None and outcome.dots:
        config.dot_dir.mkdir(parents=True, exist_ok=True)
        for name, text in outcome.dots.items():
            (config.dot_dir / f"{name}.dot").write_text(text, encoding="utf-8")
    return outcome.code
