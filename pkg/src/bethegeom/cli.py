"""Batch verification runs driven by a single JSON config.

Config schema (every key optional)::

    {
      "command": "verify-all",            # spectrum|bethe|qoperator|vertex|qq|oper|trs|verify-all
      "suites": null,                     # verify-all only: subset of suites, [] runs nothing
      "chain": {"n": 3, "a": null, "hbar": null, "zeta": null, "k": null},
      "solver": {...HomotopyConfig fields...},
      "D": 6,
      "nodes": null,                      # eps values for the q -> 1 extrapolation
      "precision": "std",                 # std (binary64) or extended (34 digits)
      "seed": 0
    }

Complex values are numbers, ``[re, im]`` pairs or strings such as ``"0.3+0.1j"``.
Missing chain values are drawn from the seeded generator.  Exit status is 0
when every check passes, 1 when one fails and 2 on configuration or I/O errors.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional

import click
import numpy as np

from . import errors as err
from .bethe import HomotopyConfig
from .sampling import annulus, evaluation_parameters
from .spinchain import ChainSpec
from .suites import SUITES, VERIFY_ALL_ORDER, Check, SuiteSettings

COMMANDS = tuple(SUITES) + ("verify-all",)
EXIT_OK, EXIT_FAIL, EXIT_INFRA = 0, 1, 2


class ParseError(err.BetheGeomError):
    pass


@dataclass
class RunConfig:
    command: str = "verify-all"
    suites: Optional[List[str]] = None
    n: int = 3
    a: Optional[List[complex]] = None
    hbar: Optional[complex] = None
    zeta: Optional[complex] = None
    k: Optional[int] = None
    solver: HomotopyConfig = field(default_factory=HomotopyConfig)
    D: int = 6
    nodes: Optional[List[float]] = None
    precision: str = "std"
    seed: int = 0

    def resolved_chain(self) -> ChainSpec:
        """Fill unspecified chain values from the seed, in a fixed draw order."""
        rng = np.random.default_rng(self.seed)
        a = evaluation_parameters(rng, self.n)
        hbar = annulus(rng, 0.3, 0.7, 1)[0]
        zeta = annulus(rng, 0.5, 0.9, 1)[0]
        return ChainSpec(
            tuple(self.a) if self.a is not None else tuple(a),
            self.hbar if self.hbar is not None else hbar,
            self.zeta if self.zeta is not None else zeta,
        )

    def echo(self, spec: ChainSpec) -> Dict[str, Any]:
        return {
            "command": self.command,
            "suites": self.suites,
            "chain": {"n": spec.n, "a": [_cjson(x) for x in spec.a], "hbar": _cjson(spec.hbar),
                      "zeta": _cjson(spec.zeta), "k": self.k},
            "solver": asdict(self.solver),
            "D": self.D,
            "nodes": self.nodes,
            "precision": self.precision,
            "seed": self.seed,
        }


def _cjson(x) -> List[float]:
    x = complex(x)
    return [x.real, x.imag]


def _complex(value, path: str) -> complex:
    try:
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return complex(float(value[0]), float(value[1]))
        if isinstance(value, str):
            return complex(value.replace(" ", ""))
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return complex(value)
    except (TypeError, ValueError):
        pass
    raise err.InvariantViolation(f"{path}: expected a complex number, got {value!r}")


def validate_config(raw: str, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Parse and check a config document; chain guards run eagerly."""
    try:
        doc = json.loads(raw) if raw.strip() else {}
    except json.JSONDecodeError as e:
        raise ParseError(f"config is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ParseError("config must be a JSON object")
    doc = dict(doc)
    for key, val in (overrides or {}).items():
        if val is not None:
            doc[key] = val
    known = {"command", "suites", "chain", "solver", "D", "nodes", "precision", "seed"}
    extra = sorted(set(doc) - known)
    if extra:
        raise err.InvariantViolation(f"unknown keys: {', '.join(extra)}")
    cfg = RunConfig()
    cfg.command = doc.get("command", cfg.command)
    if cfg.command not in COMMANDS:
        raise err.InvariantViolation(f"command: unknown {cfg.command!r}")
    if doc.get("suites") is not None:
        suites = doc["suites"]
        if not isinstance(suites, list) or any(s not in SUITES for s in suites):
            raise err.InvariantViolation(f"suites: entries must be among {sorted(SUITES)}")
        cfg.suites = list(suites)
    chain = doc.get("chain", {}) or {}
    if not isinstance(chain, dict):
        raise err.InvariantViolation("chain: expected an object")
    if chain.get("a") is not None:
        cfg.a = [_complex(v, f"chain.a[{i}]") for i, v in enumerate(chain["a"])]
        cfg.n = len(cfg.a)
        if "n" in chain and chain["n"] != cfg.n:
            raise err.InvariantViolation("chain.n: disagrees with len(chain.a)")
    else:
        cfg.n = int(chain.get("n", cfg.n))
    if cfg.n < 1:
        raise err.InvariantViolation("chain.n: must be positive")
    if chain.get("hbar") is not None:
        cfg.hbar = _complex(chain["hbar"], "chain.hbar")
    if chain.get("zeta") is not None:
        cfg.zeta = _complex(chain["zeta"], "chain.zeta")
    if chain.get("k") is not None:
        cfg.k = int(chain["k"])
        if not 0 <= cfg.k <= cfg.n:
            raise err.InvariantViolation(f"chain.k: must lie in 0..{cfg.n}")
    solver = doc.get("solver", {}) or {}
    names = {f.name: f.type for f in fields(HomotopyConfig)}
    bad = sorted(set(solver) - set(names))
    if bad:
        raise err.InvariantViolation(f"solver: unknown fields {', '.join(bad)}")
    try:
        cfg.solver = HomotopyConfig(**{k: type(getattr(HomotopyConfig(), k))(v) for k, v in solver.items()})
    except (TypeError, ValueError) as e:
        raise err.InvariantViolation(f"solver: {e}") from e
    cfg.D = int(doc.get("D", cfg.D))
    if cfg.D < 1:
        raise err.InvariantViolation("D: must be at least 1")
    if doc.get("nodes") is not None:
        cfg.nodes = [float(x) for x in doc["nodes"]]
        if len(cfg.nodes) < 2 or any(not 0 < x < 1 for x in cfg.nodes):
            raise err.InvariantViolation("nodes: need at least two values in (0, 1)")
    cfg.precision = doc.get("precision", cfg.precision)
    if cfg.precision not in ("std", "extended"):
        raise err.InvariantViolation("precision: expected std or extended")
    cfg.seed = int(doc.get("seed", cfg.seed))
    try:
        cfg.resolved_chain()
    except err.InvariantViolation as e:
        raise err.InvariantViolation(f"chain: {e}") from e
    return cfg


@dataclass
class Report:
    config: Dict[str, Any]
    checks: List[Check]

    @property
    def failed(self) -> int:
        return sum(not c.passed for c in self.checks)

    def summary(self) -> Dict[str, int]:
        return {"total": len(self.checks), "passed": len(self.checks) - self.failed, "failed": self.failed}


def run(cfg: RunConfig) -> Report:
    spec = cfg.resolved_chain()
    settings = SuiteSettings(k=cfg.k, D=cfg.D, nodes=cfg.nodes, precision=cfg.precision, solver=cfg.solver)
    # Separate stream from the chain draws so fixing a chain leaves test points unchanged.
    rng = np.random.default_rng([cfg.seed, 1])
    if cfg.command == "verify-all":
        names = VERIFY_ALL_ORDER if cfg.suites is None else [s for s in VERIFY_ALL_ORDER if s in cfg.suites]
    else:
        names = [cfg.command]
    checks: List[Check] = []
    for name in names:
        for suite in SUITES[name]:
            checks.extend(suite(spec, settings, rng))
    return Report(cfg.echo(spec), checks)


def _jsonable(x):
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (bool, int, float, str)):
        return x
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _num(x: float):
    x = float(x)
    return x if np.isfinite(x) else str(x)


def render(report: Report, fmt: str, timings: bool = False) -> str:
    """Text of the report; wall times are blank unless ``timings`` since they break byte stability."""
    if fmt == "json":
        doc = {
            "config": report.config,
            "checks": [
                {"name": c.name, "inputs": c.inputs, "residual": _num(c.residual), "tolerance": c.tolerance,
                 "pass": c.passed, "seconds": round(c.seconds, 6) if timings else None, "note": c.note}
                for c in report.checks
            ],
            "summary": report.summary(),
        }
        return json.dumps(doc, indent=2, sort_keys=True, default=_jsonable) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "residual", "tolerance", "pass", "seconds"])
        for c in report.checks:
            w.writerow([c.name, repr(float(c.residual)), repr(c.tolerance), int(c.passed),
                        f"{c.seconds:.6f}" if timings else ""])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def emit(report: Report, fmt: str, out: Optional[str], timings: bool = False) -> None:
    text = render(report, fmt, timings)
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.argument("command", type=click.Choice(COMMANDS))
@click.option("--config", "config_path", type=click.Path(), default=None, help="JSON config file.")
@click.option("--seed", type=int, default=None, help="Overrides the config seed.")
@click.option("--out", type=click.Path(), default=None, help="Output file (stdout if omitted).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.option("--precision", type=click.Choice(["std", "extended"]), default=None)
@click.option("--timings", is_flag=True, help="Record wall time per check.")
def main(command, config_path, seed, out, fmt, precision, timings):
    """Run one verification suite, or all of them, and report residuals."""
    try:
        raw = ""
        if config_path is not None:
            with open(config_path, encoding="utf-8") as fh:
                raw = fh.read()
        cfg = validate_config(raw, {"command": command, "seed": seed, "precision": precision})
        report = run(cfg)
        emit(report, fmt, out, timings)
    except (err.BetheGeomError, OSError) as e:
        click.echo(f"error: {type(e).__name__}: {e}", err=True)
        sys.exit(EXIT_INFRA)
    sys.exit(EXIT_FAIL if report.failed else EXIT_OK)


if __name__ == "__main__":
    main()
