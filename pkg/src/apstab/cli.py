"""``apstab`` command line: certify / simulate / analyze / demo.

Exit codes: 0 success, 1 input error, 2 infeasible criterion, 3 blow-up,
4 an analysis assertion failed.  ``APSTAB_LOG`` sets the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import catalog
from .analysis import (almost_period_defect, boundedness_check, defect_settling_time,
                       fit_exponential_rate, solve_equilibrium, trajectory_distance,
                       transient_length)
from .certificate import (certify_at_beta, certify_lemma1, check_pointwise_criterion,
                          maximize_beta)
from .errors import AssumptionError, BlowUpError, InfeasibleError, InsufficientDataError, \
    ModelError
from .history import HistoryFunction
from .integrator import SimConfig, Trajectory, integrate
from .model import ScanConfig, derive_bounds, find_almost_period, validate_assumptions
from .modelio import ModelFormatError, load_model, save_model

log = logging.getLogger("apstab")

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_BLOWUP, EXIT_ASSERT = 0, 1, 2, 3, 4
MAX_OMEGAS = 50


@dataclass
class RunSpec:
    command: str
    model_path: Optional[Path] = None
    output_dir: Path = Path("apstab-out")
    step: float = 0.01
    horizon: float = 20.0
    record_stride: int = 1
    tail_tolerance: float = 1e-10
    seed: Optional[int] = None
    epsilon: float = 0.1
    omega_range: tuple = (0.0, 200.0)
    window: Optional[tuple] = None
    floor: float = 1e-10
    min_rate_factor: float = 0.9
    defect_envelope: float = 0.5
    equilibrium_tol: float = 1e-8
    extra: dict = field(default_factory=dict)

    def sim_config(self) -> SimConfig:
        return SimConfig(step=self.step, horizon=self.horizon,
                         tail_tolerance=self.tail_tolerance, record_stride=self.record_stride)


def _dump(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x)}")


def _artifact(spec: RunSpec, name: str, suffix: str) -> Path:
    spec.output_dir.mkdir(parents=True, exist_ok=True)
    return spec.output_dir / f"{name}.{suffix}"


def _load(spec: RunSpec):
    if spec.model_path is None:
        raise ModelFormatError("--model is required")
    model = load_model(spec.model_path)
    name = model.name if model.name != "model" else spec.model_path.stem
    return model, name


def _seed_history(n: int, seed: int) -> HistoryFunction:
    rng = np.random.default_rng(seed)
    return HistoryFunction.constant(rng.uniform(-2.0, 2.0, size=n))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_certify(spec: RunSpec) -> int:
    model, name = _load(spec)
    report = validate_assumptions(model)
    out = _artifact(spec, name, "certificate.json")
    doc = {"model": name, "assumptions": report.to_dict()}
    if not report.passed:
        doc["feasible"] = False
        _dump(out, doc)
        for it in report.failures():
            print(f"assumption item {it.item} ({it.name}) failed: {it.detail}", file=sys.stderr)
        return EXIT_INPUT
    bounds = derive_bounds(model)
    log.info("%s: d_inf=%s, i_hat=%.6g, beta cap=%.6g", name, bounds.d_inf.tolist(),
             bounds.i_hat, min(bounds.d_inf.min(), bounds.min_decay))
    doc["bounds"] = {"d_inf": bounds.d_inf, "a_sup": bounds.a_sup, "tau_sup": bounds.tau_sup,
                     "b_sup": bounds.b_sup, "G": bounds.G, "F": bounds.F,
                     "i_hat": bounds.i_hat}
    try:
        cert = maximize_beta(bounds)
    except InfeasibleError as exc:
        doc.update({"feasible": False, "reason": str(exc), "xi": None, "beta": None,
                    "eta": None, "method": "spectral", "pointwise_min_slack": None})
        _dump(out, doc)
        log.info("%s: infeasible", name)
        return EXIT_INFEASIBLE
    audit = check_pointwise_criterion(model, cert, np.linspace(0.0, 200.0, 4001))
    cert = audit.certificate
    doc.update(cert.to_dict())
    zero = certify_at_beta(bounds, 0.0)
    lemma = certify_lemma1(bounds, zero.xi_array)
    doc["boundedness"] = {"xi": list(zero.xi), "eta": lemma.eta, "i_hat": lemma.i_hat,
                          "bound": lemma.bound}
    _dump(out, doc)
    print(f"{name}: feasible, beta={cert.beta:.6g}, eta={cert.eta:.3g}, xi={list(cert.xi)}")
    return EXIT_OK


def _simulate_one(model, spec: RunSpec, history, path: Path) -> dict:
    traj = integrate(model, spec.sim_config(), history=history)
    traj.to_csv(path)
    return {"file": path.name, "rows": int(traj.times.size), **traj.meta}


def cmd_simulate(spec: RunSpec) -> int:
    model, name = _load(spec)
    report = validate_assumptions(model)
    if not report.passed:
        for it in report.failures():
            print(f"assumption item {it.item} ({it.name}) failed: {it.detail}", file=sys.stderr)
        return EXIT_INPUT
    meta = {"model": name, "step": spec.step, "horizon": spec.horizon,
            "record_stride": spec.record_stride, "runs": []}
    runs = [(model.history, _artifact(spec, name, "trajectory.csv"))]
    if spec.seed is not None:
        runs.append((_seed_history(model.n, spec.seed),
                     _artifact(spec, name, f"trajectory-seed{spec.seed}.csv")))
    status = EXIT_OK
    for history, path in runs:
        log.info("%s: integrating to T=%g with h=%g -> %s", name, spec.horizon, spec.step,
                 path.name)
        try:
            meta["runs"].append(_simulate_one(model, spec, history, path))
        except BlowUpError as exc:
            meta["runs"].append({"file": path.name, "blowup_time": exc.time, "error": str(exc)})
            print(f"{name}: blow-up at t={exc.time:.6g}", file=sys.stderr)
            status = EXIT_BLOWUP
            break
    _dump(_artifact(spec, name, "simulate.json"), meta)
    return status


def _pair_path(spec: RunSpec, name: str) -> Optional[Path]:
    if spec.seed is not None:
        p = spec.output_dir / f"{name}.trajectory-seed{spec.seed}.csv"
        return p if p.exists() else None
    found = sorted(spec.output_dir.glob(f"{name}.trajectory-seed*.csv"))
    return found[0] if found else None


def _default_window(times, dist, max_delay, floor):
    # start after one delay horizon, stop before the series reaches the noise floor
    t0 = max(1.0, 2.0 * max_delay)
    t1 = 2.0 * times[-1] / 3.0
    low = np.flatnonzero((times > t0) & (dist < 1e3 * floor))
    if low.size:
        t1 = min(t1, float(times[low[0]]))
    return (t0, max(t1, t0))


def cmd_analyze(spec: RunSpec) -> int:
    model, name = _load(spec)
    cert_path = spec.output_dir / f"{name}.certificate.json"
    main_path = spec.output_dir / f"{name}.trajectory.csv"
    pair_path = _pair_path(spec, name)
    missing = [str(p) for p in (cert_path, main_path) if not p.exists()]
    if pair_path is None:
        missing.append(str(spec.output_dir / f"{name}.trajectory-seed*.csv"))
    if missing:
        print(f"missing inputs: {', '.join(sorted(set(missing)))}", file=sys.stderr)
        return EXIT_INPUT
    cert = json.loads(cert_path.read_text())
    if not cert.get("feasible"):
        print(f"{name}: certificate is not feasible; nothing to analyze", file=sys.stderr)
        return EXIT_INPUT
    u = Trajectory.from_csv(main_path, name)
    v = Trajectory.from_csv(pair_path, name)
    xi = np.asarray(cert["xi"], dtype=float)
    beta = float(cert["beta"])
    h = u.spacing
    report = {"model": name, "certificate_beta": beta, "checks": {}}
    checks = report["checks"]

    # exponential convergence of two solutions towards each other
    times, dist = trajectory_distance(u, v, xi)
    with open(_artifact(spec, name, "distance.csv"), "w") as fh:
        fh.write("t,distance\n")
        for t, d in zip(times, dist):
            fh.write(f"{t:.17g},{d:.17g}\n")
    window = spec.window or _default_window(times, dist, model.max_delay(), spec.floor)
    log.info("%s: rate-fit window %s", name, window)
    try:
        fit = fit_exponential_rate(times, dist, window, spec.floor)
        threshold = spec.min_rate_factor * beta
        checks["decay"] = {**fit.to_dict(), "threshold": threshold,
                           "passed": bool(fit.rate >= threshold)}
    except InsufficientDataError as exc:
        checks["decay"] = {"skipped": str(exc)}

    # ultimate bound of the boundedness estimate
    bd = cert.get("boundedness") or {}
    if bd.get("bound") is not None:
        xi0 = np.asarray(bd["xi"], dtype=float)
        res = [boundedness_check(tr, xi0, bd["i_hat"], bd["eta"], tol=10 * h, history=hist)
               for tr, hist in ((u, model.history), (v, None))]
        checks["boundedness"] = {"runs": [r.to_dict() for r in res],
                                 "passed": all(r.passed for r in res)}

    # almost periods of the coefficients carried over to the solution
    burn = transient_length(beta, model.max_delay())
    omegas = find_almost_period(model.coefficient_signals(), spec.epsilon, spec.omega_range,
                                ScanConfig())
    usable = [w for w in omegas if burn + w < u.t_end - h]
    if len(usable) > MAX_OMEGAS:
        usable = [usable[k] for k in np.linspace(0, len(usable) - 1, MAX_OMEGAS).astype(int)]
    entries = []
    for w in usable:
        entries.append({"omega": float(w),
                        "defect": almost_period_defect(u, w, (burn, u.t_end - w), xi),
                        "settling_time": defect_settling_time(u, w, spec.epsilon, xi)})
    checks["almost_period"] = {
        "epsilon": spec.epsilon, "search_interval": list(spec.omega_range),
        "candidates_found": int(omegas.size), "transient": burn, "results": entries,
        "envelope": spec.defect_envelope, "empirical_envelope": True,
        "note": "defect envelope is an empirical gain allowance, not a proven bound",
    }
    if entries:
        checks["almost_period"]["passed"] = all(e["defect"] < spec.defect_envelope
                                                for e in entries)
    else:
        checks["almost_period"]["skipped"] = "no candidate fits inside the recorded range"

    if model.is_autonomous:
        root, resid = solve_equilibrium(model, u.states[-1])
        dev = float(np.max(np.abs(u.states[-1] - root)))
        checks["equilibrium"] = {"root": root, "root_residual": resid,
                                 "residual": dev, "tolerance": spec.equilibrium_tol,
                                 "passed": bool(dev < spec.equilibrium_tol)}

    enabled = [c for c in checks.values() if "passed" in c]
    report["passed"] = all(c["passed"] for c in enabled)
    _dump(_artifact(spec, name, "report.json"), report)
    for key, c in checks.items():
        status = "skip" if "passed" not in c else ("pass" if c["passed"] else "FAIL")
        print(f"{name}: {key:14s} {status}")
    return EXIT_OK if report["passed"] else EXIT_ASSERT


def cmd_demo(spec: RunSpec) -> int:
    worst = EXIT_OK
    seed = 7 if spec.seed is None else spec.seed
    for name, (factory, step, horizon) in catalog.DEMO_MODELS.items():
        spec.output_dir.mkdir(parents=True, exist_ok=True)
        path = spec.output_dir / f"{name}.model.json"
        save_model(factory(), path)
        sub = RunSpec(command="demo", model_path=path, output_dir=spec.output_dir, step=step,
                      horizon=horizon, seed=seed, epsilon=spec.epsilon,
                      omega_range=spec.omega_range)
        for cmd in (cmd_certify, cmd_simulate, cmd_analyze):
            code = cmd(sub)
            if code != EXIT_OK:
                worst = max(worst, code)
                break
    return worst


COMMANDS = {"certify": cmd_certify, "simulate": cmd_simulate, "analyze": cmd_analyze,
            "demo": cmd_demo}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="apstab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--model", type=Path, help="model JSON document")
    p.add_argument("--out", type=Path, default=Path("apstab-out"), help="output directory")
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--horizon", type=float, default=20.0)
    p.add_argument("--stride", type=int, default=1, help="record every k-th step")
    p.add_argument("--seed", type=int, default=None,
                   help="simulate a second run from a random constant history")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--omega-range", type=float, nargs=2, default=(0.0, 200.0))
    p.add_argument("--window", type=float, nargs=2, default=None, help="rate-fit window")
    p.add_argument("--floor", type=float, default=1e-10)
    p.add_argument("--min-rate-factor", type=float, default=0.9)
    p.add_argument("--defect-envelope", type=float, default=0.5)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("APSTAB_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    spec = RunSpec(command=args.command, model_path=args.model, output_dir=args.out,
                   step=args.step, horizon=args.horizon, record_stride=args.stride,
                   seed=args.seed, epsilon=args.epsilon, omega_range=tuple(args.omega_range),
                   window=tuple(args.window) if args.window else None, floor=args.floor,
                   min_rate_factor=args.min_rate_factor, defect_envelope=args.defect_envelope)
    try:
        return COMMANDS[args.command](spec)
    except (ModelError, AssumptionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
