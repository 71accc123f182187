"""Command-line batch runner.

``relsusy <command> [--config cfg.json] [--out report.json] [--csv table.csv] [--quiet]``

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
3 numerical error (supercritical spectrum, shift on the spectrum, singular
``sgn H``).  ``all`` runs every suite and exits with the worst code.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (
    LevelLabel,
    match_levels,
    nonrel_level,
    relativistic_energy,
    compare_spectrum,
    spin_projections,
)
from .config import ConfigError, RunConfig, load_config
from .fw import (
    fw_hamiltonian,
    fw_pipeline,
    interior_fw_spectrum,
    nonrel_limit_check,
    partner_energy_residual,
    spectral_symmetry_residual,
)
from .models import (
    build_model,
    energy_momentum_residual,
    mo_commutator_norm,
    mo_oracle_norm,
    pi_identity_suite,
    supercritical_margin,
)
from .opalg import NegativeSpectrum, NumericalError
from .report import CheckReport
from .resolvent import block_resolvent, energies, first_resolvent_identity
from .spin import so3_residuals, spin1_identity_suite, spin_matrices
from .susy import (
    build_susy_system,
    isospectrality_residual,
    kernel_scan,
    partner_spectrum_map,
    verify_susy_algebra,
    witten_index,
)

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

COMMANDS = ("spectrum", "susy-check", "fw-check", "resolvent", "witten-scan",
            "identities", "nonrel-limit", "all")

CSV_COLUMNS = ("n", "s_z", "k_z", "epsilon_nonrel", "E_plus", "E_minus",
               "analytic_E", "abs_error")


@dataclass
class CommandResult:
    command: str
    report: CheckReport = field(default_factory=CheckReport)
    data: dict = field(default_factory=dict)
    diagnostic: dict | None = None
    rows: list | None = None

    @property
    def exit_code(self) -> int:
        if self.diagnostic is not None:
            return EXIT_NUMERICAL
        return EXIT_PASS if self.report.overall_pass else EXIT_FAIL

    def to_dict(self) -> dict:
        out = {"exit_code": self.exit_code, "report": self.report.to_dict(), "data": self.data}
        if self.diagnostic is not None:
            out["diagnostic"] = self.diagnostic
        return out


class _Stage:
    """Remembers which check is running so numerical errors can name it."""

    def __init__(self):
        self.name = "setup"

    def __call__(self, name: str) -> "_Stage":
        self.name = name
        return self


def _c(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _zlabel(z: complex) -> str:
    # adding 0.0 turns a negative zero into +0 so labels read "0-1i"
    return f"{z.real + 0.0:g}{z.imag + 0.0:+g}i"


# -- commands ---------------------------------------------------------------

def _proj(spec):
    return [0] if spec.case == "kg" else spin_projections(spec.case)


def _spectrum(cfg: RunConfig, res: CommandResult, stage: _Stage) -> None:
    spec = cfg.spec
    if spec.case == "spin1":
        stage("supercritical_margin")
        margin = supercritical_margin(spec)
        res.data["supercritical_margin"] = margin.margin
    stage("fw_hamiltonian")
    try:
        fw = fw_hamiltonian(build_model(spec))
    except NegativeSpectrum as exc:
        # Lowest spin-one level (n = 0, s_z = -1) has the smallest radicand.
        lowest = relativistic_energy(spec.case, LevelLabel(0, min(_proj(spec)), spec.k_z), spec)
        if lowest.supercritical:
            raise NegativeSpectrum(f"supercritical field, lowest-level energy {lowest.value}: "
                                   f"{exc}") from exc
        raise
    stage("compare_spectrum")
    w, v = interior_fw_spectrum(fw, spec)
    res.report.extend(compare_spectrum(w, spec, vectors=v))
    matches, _ = match_levels(w, spec, vectors=v)
    by_label = {(m.label.n, m.label.s_z, m.branch): m for m in matches}
    rows = []
    projections = [None] if spec.case == "kg" else sorted({m.label.s_z for m in matches},
                                                          reverse=True)
    for n in range(spec.n_fock - spec.buffer):
        for s_z in projections:
            plus, minus = by_label.get((n, s_z, 1)), by_label.get((n, s_z, -1))
            label = LevelLabel(n, s_z, spec.k_z)
            analytic = relativistic_energy(spec.case, label, spec, 1).value.real
            err = max(m.abs_error for m in (plus, minus) if m is not None)
            rows.append({
                "n": n, "s_z": "" if s_z is None else float(s_z), "k_z": spec.k_z,
                "epsilon_nonrel": nonrel_level(spec.case, label, spec),
                "E_plus": plus.numeric if plus else float("nan"),
                "E_minus": minus.numeric if minus else float("nan"),
                "analytic_E": analytic, "abs_error": err,
            })
    res.rows = rows
    res.data["levels"] = len(rows)
    res.data["lowest_positive"] = float(np.min(w[w > 0])) if np.any(w > 0) else None


def _susy_check(cfg: RunConfig, res: CommandResult, stage: _Stage) -> None:
    spec = cfg.spec
    tol = spec.tolerances.interior_tol
    H = build_model(spec)
    stage("build_susy_system")
    sys_ = build_susy_system(H)
    stage("verify_susy_algebra")
    res.report.extend(verify_susy_algebra(sys_, H))
    stage("partner_spectrum_map")
    pair = partner_spectrum_map(sys_, H)
    res.report.add("partner_isospectrality", isospectrality_residual(pair), tol)
    res.report.add("susy_map_eigen_residual", pair.max_map_residual, tol)
    res.report.add("susy_map_norm_residual", pair.max_norm_residual, tol)
    res.report.add("mass_match", pair.max_mass_mismatch(), tol)
    stage("witten_index")
    wi = witten_index(sys_)
    res.report.add_flag("supercharge_kernel_sum", wi.consistent)
    res.data["witten"] = {"dim_ker_plus": wi.dim_ker_plus, "dim_ker_minus": wi.dim_ker_minus,
                          "delta": wi.delta,
                          "dim_ker_supercharge_sum": wi.dim_ker_supercharge_sum}
    res.data["paired_levels"] = sum(r.paired for r in pair.records)


def _fw_check(cfg: RunConfig, res: CommandResult, stage: _Stage) -> None:
    spec = cfg.spec
    tol = spec.tolerances.interior_tol
    H = build_model(spec)
    stage("fw_pipeline")
    fw = fw_pipeline(H)
    res.report.extend(fw.residuals)
    stage("partner_energies")
    sys_ = build_susy_system(H)
    pair = partner_spectrum_map(sys_, H)
    res.report.add("partner_energies", partner_energy_residual(fw, pair, spec), tol)
    res.report.add("spectral_symmetry", spectral_symmetry_residual(fw, spec), tol)
    stage("energy_momentum")
    res.report.add("energy_momentum", energy_momentum_residual(H), tol)


def _resolvent(cfg: RunConfig, res: CommandResult, stage: _Stage) -> None:
    spec = cfg.spec
    tol = spec.tolerances.interior_tol
    H = build_model(spec)
    stage("spectrum_for_shift_admissibility")
    e = energies(H)
    shifts = cfg.resolved_shifts()
    for z in shifts:
        stage(f"block_resolvent(z={z})")
        r = block_resolvent(H, z, e)
        tag = f"z={_zlabel(z)}"
        res.report.add(f"direct[{tag}]", r.residual_direct, tol, unwindowed=r.unwindowed_direct)
        res.report.add(f"iterated[{tag}]", r.residual_iterated, tol)
        res.report.add(f"reduction[{tag}]", r.residual_reduction, tol)
    for z1, z2 in zip(shifts, shifts[1:]):
        stage(f"first_resolvent_identity(z1={z1}, z2={z2})")
        res.report.add(f"first_identity[{_zlabel(z1)},{_zlabel(z2)}]",
                       first_resolvent_identity(H, z1, z2), tol)
    res.data["shifts"] = [_c(z) for z in shifts]


def _witten_scan(cfg: RunConfig, res: CommandResult, stage: _Stage) -> None:
    spec = cfg.spec
    grid = np.linspace(cfg.kz_min, cfg.kz_max, cfg.points)
    stage("kernel_scan")
    scan = kernel_scan(spec, grid)
    consistent = True
    deltas = set()
    for p in scan.points:
        if p["dim_ker"]:
            stage(f"witten_index(k_z={p['k_z']})")
            wi = witten_index(build_susy_system(build_model(spec.replace(k_z=p["k_z"]))))
            consistent &= wi.consistent
            deltas.add(wi.delta)
    res.report.add_flag("supercharge_kernel_sum", consistent)
    res.report.add_flag("witten_index_zero", deltas <= {0})
    res.data["points"] = scan.points
    res.data["kernel_points"] = scan.kernel_points
    res.data["crossings"] = scan.crossings
    res.data["grid_step"] = float(grid[1] - grid[0])


def _identities(cfg: RunConfig, res: CommandResult, stage: _Stage) -> None:
    spec = cfg.spec
    tol = spec.tolerances.interior_tol
    stage("so3_residuals")
    res.report.extend(so3_residuals(spin_matrices(spec.spin)))
    if spec.case == "spin1":
        stage("spin1_identity_suite")
        res.report.extend(spin1_identity_suite(spin_matrices(1)))
    stage("pi_identity_suite")
    res.report.extend(pi_identity_suite(spec))
    stage("mo_commutator_norm")
    H = build_model(spec)
    mo = mo_commutator_norm(H)
    if spec.g == 2 or spec.case != "spin1":
        res.report.add("mo_commutator", mo, tol)
    else:
        res.report.add("mo_commutator", mo, tol, passed=True, informational=True,
                       oracle=mo_oracle_norm(spec))
    stage("energy_momentum")
    res.report.add("energy_momentum", energy_momentum_residual(H), tol)
    if spec.case == "spin1":
        m = supercritical_margin(spec)
        res.data["supercritical_margin"] = m.margin
        res.data["compton_over_larmor"] = m.compton_over_larmor


def _nonrel_limit(cfg: RunConfig, res: CommandResult, stage: _Stage) -> None:
    stage("nonrel_limit_check")
    res.report.extend(nonrel_limit_check(cfg.spec, cfg.c_list))


_RUNNERS = {
    "spectrum": _spectrum,
    "susy-check": _susy_check,
    "fw-check": _fw_check,
    "resolvent": _resolvent,
    "witten-scan": _witten_scan,
    "identities": _identities,
    "nonrel-limit": _nonrel_limit,
}


def run_command(command: str, cfg: RunConfig) -> CommandResult:
    """Run one suite, turning numerical errors into an exit-3 diagnostic."""
    res = CommandResult(command)
    stage = _Stage()
    try:
        _RUNNERS[command](cfg, res, stage)
    except NumericalError as exc:
        res.diagnostic = {"check": stage.name, "error": type(exc).__name__,
                          "message": str(exc)}
    return res


def execute(command: str, cfg: RunConfig) -> tuple[int, dict, list | None]:
    """Run ``command``; return the exit code, the report payload and CSV rows."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    names = [c for c in COMMANDS if c != "all"] if command == "all" else [command]
    results = {name: run_command(name, cfg) for name in names}
    code = max(r.exit_code for r in results.values())
    payload = {
        "command": command,
        "config": cfg.to_dict(),
        "exit_code": code,
        "overall_pass": code == EXIT_PASS,
        "results": {name: r.to_dict() for name, r in results.items()},
    }
    rows = results["spectrum"].rows if "spectrum" in results else None
    return code, payload, rows


# -- output -----------------------------------------------------------------

def _atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return _c(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else repr(x)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def report_json(payload: dict, command: str, timestamp: str | None = None) -> str:
    """Serialise a payload with its metadata header.

    Only ``metadata`` carries run-dependent values; compare ``payload`` for
    reproducibility checks.
    """
    if timestamp is None:
        timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    doc = {"metadata": {"tool": "relsusy", "version": __version__, "command": command,
                        "timestamp": timestamp},
           "payload": _jsonable(payload)}
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_payload(path: str | Path) -> dict:
    """The comparison-mode view of a report file (metadata stripped)."""
    return json.loads(Path(path).read_text())["payload"]


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def spectrum_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def _summary(code: int, payload: dict) -> str:
    lines = []
    for name, r in payload["results"].items():
        rep = r["report"]
        failed = [e["name"] for e in rep["entries"] if not e["pass"]]
        status = {0: "PASS", 1: "FAIL", 3: "NUMERICAL ERROR"}[r["exit_code"]]
        line = f"{name}: {status} ({len(rep['entries'])} checks)"
        if failed:
            line += " failed: " + ", ".join(failed)
        if "diagnostic" in r:
            d = r["diagnostic"]
            line += f" [{d['error']} in {d['check']}: {d['message']}]"
        lines.append(line)
    lines.append(f"exit code {code}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relsusy", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON run configuration (defaults when omitted)")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--csv", help="write the spectrum table here")
    p.add_argument("--quiet", action="store_true", help="suppress the summary on stderr")
    p.add_argument("--version", action="version", version=f"relsusy {__version__}")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"relsusy: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    code, payload, rows = execute(args.command, cfg)
    text = report_json(payload, args.command)
    out = args.out or cfg.json_path
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)
    csv_path = args.csv or cfg.csv_path
    if csv_path and rows is not None:
        _atomic_write(csv_path, spectrum_csv(rows))
    if not args.quiet:
        print(_summary(code, payload), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
