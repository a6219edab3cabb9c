"""Command-line surface: ``run``, ``check``, ``probe`` and ``resume``.

Exit codes: 0 when every verdict passes, 1 on any failed verdict, 2 on usage
or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import checks
from . import diagnostics as dg
from . import spectral as sp
from .experiments import (Verdict, assert_run_invariants, inequality_probe, integrate,
                          log_sobolev_ensemble, run_scenario)
from .io import (CheckpointError, ConfigError, OutputLockedError, load_checkpoint, load_meta,
                 output_lock, parse_config, parse_probe_config, save_checkpoint, write_records)
from .model import PhysParams
from .timestepper import InstabilityError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_OUT = Path("hallmhd_out")

log = logging.getLogger("hallmhd")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def _write_verdict(v: Verdict, out: Path) -> None:
    payload = {"kind": v.kind, "passed": v.passed, "criteria": v.criteria,
               "measured": v.measured, "violations": v.violations, "series": v.series}
    (out / "verdict.json").write_text(json.dumps(_jsonable(payload), indent=2))


def _report(v: Verdict) -> int:
    for line in v.lines():
        print(line)
    return EXIT_OK if v.passed else EXIT_FAIL


def _checkpointer(out: Path, every):
    if every is None:
        return None

    def factory(name, params: PhysParams, fixed_dt):
        path = out / f"{name}.ckpt"

        def hook(s, nstep, diss_u, diss_b):
            if nstep % every == 0:
                save_checkpoint(s, path, {"series": name, "step": nstep, "diss_u": diss_u,
                                          "diss_b": diss_b, "params": asdict(params),
                                          "fixed_dt": fixed_dt})
        return hook
    return factory


def cmd_run(args) -> int:
    rc = parse_config(Path(args.config).read_text())
    out = rc.output_dir or DEFAULT_OUT / rc.scenario.kind
    with output_lock(out):
        def emit(name, records):
            path = out / f"{name}.csv"
            write_records(records, path)
            return str(path)

        v = run_scenario(rc.scenario, emit=emit, checkpointer=_checkpointer(out, rc.checkpoint_every))
        _write_verdict(v, out)
    return _report(v)


def cmd_resume(args) -> int:
    rc = parse_config(Path(args.config).read_text())
    sc = rc.scenario
    meta = load_meta(args.checkpoint)
    if not meta:
        raise CheckpointError(f"missing metadata sidecar {args.checkpoint}.json")
    state = load_checkpoint(args.checkpoint, sc.n)
    params = PhysParams(**meta["params"])
    name = meta["series"]
    out = rc.output_dir or DEFAULT_OUT / sc.kind
    with output_lock(out):
        ck = _checkpointer(out, rc.checkpoint_every)
        run = integrate(state, params, sc.control, sc.m, fixed_dt=meta["fixed_dt"],
                        start_step=int(meta["step"]), diss0=(meta["diss_u"], meta["diss_b"]),
                        on_step=None if ck is None else ck(name, params, meta["fixed_dt"]))
        path = out / f"{name}_resumed.csv"
        write_records(run.records, path)
        # the energy inequality holds on every subinterval, so rebase at the restart
        du0, db0 = run.records[0].diss_u, run.records[0].diss_b
        rebased = [dg.DiagnosticsRecord(**{**asdict(r), "diss_u": r.diss_u - du0,
                                          "diss_b": r.diss_b - db0}) for r in run.records]
        v = Verdict(f"resume:{name}", series={name: str(path)})
        assert_run_invariants(v, rebased)
        v.measured.update(t_start=run.records[0].t, t_end=run.state.t, steps=run.steps)
        _write_verdict(v, out)
    return _report(v)


def cmd_check(args) -> int:
    results = checks.quick_suite()
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_probe(args) -> int:
    pc = parse_probe_config(Path(args.config).read_text())
    if pc.probe == "lemma_ode":
        from .experiments import lemma_ode_check, random_lemma_case
        rng = np.random.default_rng(pc.seed)
        statuses = []
        for _ in range(pc.cases):
            a, x0, y0, prof = random_lemma_case(rng, pc.t_end)
            statuses.append(lemma_ode_check(a, x0, y0, prof).status)
        fails = statuses.count("fail")
        summary = {"probe": pc.probe, "cases": pc.cases, "failures": fails}
        ok = fails == 0
    else:
        g = sp.Grid(pc.n)
        ens = log_sobolev_ensemble(g, pc.ensemble_size, pc.seed, (pc.amp_min, pc.amp_max), pc.band_max)
        st = inequality_probe(ens, g, pc.m, pc.large_amp)
        summary = {"probe": pc.probe, "samples": len(st.ratios), "excluded": st.excluded,
                   "max_ratio": st.max_ratio, "mean_ratio": st.mean_ratio,
                   "large_amp_slope": st.large_amp_slope}
        ok = st.passed
    summary["passed"] = ok
    if pc.output_dir is not None:
        with output_lock(pc.output_dir) as out:
            (out / "probe.json").write_text(json.dumps(_jsonable(summary), indent=2))
    for k, v in summary.items():
        print(f"{k}: {v}")
    print(f"{'PASS' if ok else 'FAIL'}  probe:{pc.probe}")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hallmhd", description="Hall-MHD spectral experiments")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="execute the scenario in a config file")
    p.add_argument("config")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("check", help="run the built-in invariant suite")
    p.set_defaults(func=cmd_check)
    p = sub.add_parser("probe", help="log-Sobolev or lemma ODE probe")
    p.add_argument("config")
    p.set_defaults(func=cmd_probe)
    p = sub.add_parser("resume", help="continue a checkpointed trajectory")
    p.add_argument("checkpoint")
    p.add_argument("config")
    p.set_defaults(func=cmd_resume)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, CheckpointError, OutputLockedError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InstabilityError as exc:
        print(f"FAIL  {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
