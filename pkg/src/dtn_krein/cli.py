"""Command-line batch driver.

Subcommands::

    dtn-krein verify         --config run.cfg --out results/
    dtn-krein dtn-sweep      --preset toy
    dtn-krein characterize   --preset random --seed 7
    dtn-krein couple-verify  --preset path3

Exit status is 0 when every check passes, 1 when any check fails and 2 on
configuration errors (in which case nothing is written).
"""
import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
import csv
import io
import json
import logging
import os
import sys
import tempfile

import numpy as np

from . import boundary_model as bm
from . import coupling as cp
from . import krein_verify as kv
from .config import GRID_PRESETS, RANDOM_PRESETS, load_config
from .elliptic_assembly import GridSpec, assemble, preset, read_coefficient_table
from .errors import ConfigError, DtnKreinError, NearSingularShift, SingularQ
from .rng import SplitMix64

log = logging.getLogger("dtn_krein")

THREADS_ENV = "DTN_KREIN_THREADS"
FD_STEPS = (1e-3, 5e-4)
FD_RATIO_BAND = (3.5, 4.5)

CSV_HEADER = ("re_lambda", "im_lambda", "min_eig_re_q", "max_eig_re_q",
              "min_eig_im_q", "max_eig_im_q", "fro_norm_q", "min_sv_q", "skipped", "model")


# ---------------------------------------------------------------------------
# model construction


def build_models(cfg):
    """Models described by `cfg`; construction failures are config errors."""
    try:
        return _build_models(cfg)
    except (DtnKreinError, ValueError, OSError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot build model: {exc}") from exc


def _build_models(cfg):
    p = cfg.preset
    if p == "toy":
        return [bm.toy_model()]
    if p == "path3":
        return [bm.path3_model()]
    if p in RANDOM_PRESETS:
        root = SplitMix64(cfg.seed)
        models = []
        for k in range(cfg.random_count):
            rng = root.split(k)
            kw = {}
            if p == "decoupled":
                if cfg.n_interior < 2:
                    raise ConfigError("decoupled preset needs random.n_interior >= 2")
                kw["decoupled_interior"] = max(1, cfg.n_interior // 5)
            elif p == "rankdef":
                r = min(cfg.n_interior, cfg.n_boundary)
                if r < 2:
                    raise ConfigError("rankdef preset needs |I|, |B| >= 2")
                kw["boundary_rank"] = r // 2
            m = bm.random_model(rng, cfg.n_interior, cfg.n_boundary,
                                complex_entries=cfg.complex_entries, **kw)
            m.name = f"{p}-{k}"
            models.append(m)
        return models
    grid = GridSpec(cfg.nx, cfg.ny, cfg.h, cfg.layout, cfg.inner)
    if p == "table":
        coeffs = read_coefficient_table(cfg.table, grid)
        if cfg.a0:
            coeffs = coeffs.with_potential(coeffs.a0 + cfg.a0)
    else:
        coeffs = preset(p, grid, cfg.a0)
    m = assemble(grid, coeffs)
    if cfg.tol.singular != bm.TAU_SINGULAR:
        m = bm.PartitionedHermitian(m.H, m.partition, m.boundary_split,
                                    tol_singular=cfg.tol.singular, name=m.name)
    return [m]


def _is_laplacian(cfg):
    return cfg.preset == "laplacian" and cfg.a0 >= 0


# ---------------------------------------------------------------------------
# evaluation helpers


def _cz(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _check(suite, lam, value, tol, relation="<=", **extra):
    value = float(value)
    passed = value <= tol if relation == "<=" else value >= tol
    rec = {"suite": suite, "lambda": None if lam is None else _cz(lam),
           "value": value, "tol": float(tol), "relation": relation, "passed": bool(passed)}
    rec.update(extra)
    return rec


def _executor_map(fn, items):
    try:
        threads = int(os.environ.get(THREADS_ENV, "0"))
    except ValueError:
        threads = 0
    items = list(items)
    if threads <= 0 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _guarded(suite, lam, fn):
    """Run `fn`; map resolvent-set failures to a skip record."""
    try:
        return fn(), None
    except (NearSingularShift, SingularQ) as exc:
        return None, {"suite": suite, "lambda": None if lam is None else _cz(lam),
                      "reason": str(exc)}


def fd_ratio(qfun, dq, lam, steps=FD_STEPS):
    """Central-difference errors at two step sizes and their ratio."""
    errs = []
    for h in steps:
        fd = (qfun(lam + h) - qfun(lam - h)) / (2 * h)
        errs.append(float(np.linalg.norm(fd - dq)))
    ratio = errs[0] / errs[1] if errs[1] > 0 else float("inf")
    return errs, ratio


def _real_points(model, cfg, coupled=False):
    if coupled:
        ops = cp.coupled_operators(model)
        lo = min(ops.sum_solver.spectrum[0], ops.transmission_solver.spectrum[0])
        return [float(lo - 1.0 - k) for k in range(cfg.sweep.real_count)]
    return kv.default_real_points(model, cfg.sweep.real_count)


def _sweep(cfg):
    s = cfg.sweep
    return kv.sweep_points((s.re_min, s.re_max), (s.im_min, s.im_max), (s.re_count, s.im_count))


# ---------------------------------------------------------------------------
# verify


def verify_model(model, cfg, laplacian=False):
    """Run every selected suite on one model.

    Returns
    -------
    (checks, skipped, krein_reports)
    """
    tol = cfg.tol
    suites = cfg.suites
    tasks = []

    def task(suite, lam, fn):
        tasks.append((suite, lam, fn))

    anchor = cfg.anchor
    for lam in cfg.points:
        if "identity" in suites:
            for mu in cfg.points:
                task("identity", lam, lambda lam=lam, mu=mu: [_check(
                    "identity", lam, bm.q_identity_residual(model, lam, mu), tol.identity,
                    mu=_cz(mu))])
        if "representation" in suites:
            task("representation", lam, lambda lam=lam: [_check(
                "representation", lam, bm.q_representation_residual(model, lam, anchor),
                tol.identity, anchor=_cz(anchor))])
        if "gamma" in suites:
            def gamma_fn(lam=lam):
                field = bm.GammaField.at(model, anchor)
                direct = bm.gamma_at(model, lam)
                upd = field(lam)
                r = np.linalg.norm(upd - direct) / max(1.0, np.linalg.norm(direct))
                return [_check("gamma", lam, r, tol.gamma),
                        _check("gamma_eigensolution", lam, field.eigensolution_residual(lam),
                               tol.gamma)]
            task("gamma", lam, gamma_fn)
        if "derivative" in suites:
            def deriv_fn(lam=lam):
                dq = bm.q_derivative(model, lam)
                errs, ratio = fd_ratio(lambda z: bm.q_at(model, z), dq, lam)
                qn = max(1.0, np.linalg.norm(bm.q_at(model, lam)))
                # below this the differences are dominated by rounding, not truncation
                floor = 1e3 * np.finfo(float).eps * qn / FD_STEPS[1]
                ok = FD_RATIO_BAND[0] <= ratio <= FD_RATIO_BAND[1] or max(errs) <= floor
                rec = _check("derivative", lam, ratio, FD_RATIO_BAND[0], ">=",
                             errors=errs, band=list(FD_RATIO_BAND),
                             roundoff_limited=bool(max(errs) <= floor))
                rec["passed"] = bool(ok)
                return [rec]
            task("derivative", lam, deriv_fn)
        if {"krein", "trace", "rank"} & suites:
            def krein_fn(lam=lam):
                rep = kv.schatten_report(model, lam)
                out = []
                if "krein" in suites:
                    out.append(_check("krein", lam, rep.krein_residual, tol.krein))
                if "trace" in suites:
                    out.append(_check("trace", lam, rep.trace_gap, tol.trace,
                                      lhs=_cz(rep.lhs_trace), rhs=_cz(rep.rhs_trace)))
                if "rank" in suites:
                    out.append(_check("rank", lam, rep.numerical_rank, model.n_boundary))
                return out, rep
            task("krein", lam, krein_fn)

    if "nevanlinna" in suites:
        for lam in _sweep(cfg) + [z for z in cfg.points if complex(z).imag != 0]:
            def nev_fn(lam=lam):
                rep = bm.nevanlinna_check(model, [lam])
                s = rep.samples[0]
                return [_check("nevanlinna_positivity", lam, s["min_eig_im"], -tol.positivity, ">="),
                        _check("nevanlinna_symmetry", lam, s["symmetry_residual"], tol.symmetry)]
            task("nevanlinna", lam, nev_fn)

    if "stieltjes" in suites:
        def stieltjes_fn():
            sd = bm.stieltjes(model, anchor)
            return [_check("stieltjes", None, sd.max_residual, tol.stieltjes,
                           points=len(sd.test_points)),
                    _check("stieltjes_weights_psd", None, sd.min_weight_eigenvalue(),
                           -tol.positivity * max(1.0, model.norm), ">=")]
        task("stieltjes", None, stieltjes_fn)

    if "real_axis" in suites:
        try:
            reals = _real_points(model, cfg)
        except DtnKreinError as exc:
            reals = []
            log.warning("real-axis suite skipped: %s", exc)
        for lam in reals:
            def real_fn(lam=lam):
                Q = bm.q_at(model, lam)
                herm = np.linalg.norm(Q - Q.conj().T) / max(1.0, np.linalg.norm(Q))
                out = [_check("real_hermitian", lam, herm, tol.symmetry),
                       _check("krein", lam, kv.krein_residual(model, lam), tol.krein)]
                if laplacian:
                    rd = kv.resolvent_difference(model, lam)
                    out.append(_check("resolvent_order", lam,
                                      np.linalg.eigvalsh((rd + rd.conj().T) / 2)[-1], 1e-12))
                return out
            task("real_axis", lam, real_fn)

    if "coupled" in suites and model.partition.exterior is not None:
        tasks.extend(_coupled_tasks(model, cfg, laplacian))

    results = _executor_map(lambda t: (t[0], t[1], _guarded(t[0], t[1], t[2])), tasks)
    checks, skipped, reports = [], [], []
    for suite, lam, (res, skip) in results:
        if skip is not None:
            skipped.append(skip)
            continue
        if isinstance(res, tuple):
            res, rep = res
            reports.append(rep.to_dict())
        checks.extend(res)
    return checks, skipped, reports


def _coupled_tasks(model, cfg, laplacian=False):
    tol = cfg.tol
    tasks = []
    n = model.n_interior + model.n_exterior
    h = np.cos(np.arange(n) * 0.7) + 0.5
    for lam in cfg.points:
        def fn(lam=lam):
            out = []
            if model.boundary_split is not None:
                out.append(_check("steklov_additivity", lam,
                                  cp.steklov_additivity_residual(model, lam), tol.additivity))
            out.append(_check("coupled_identity", lam,
                              cp.coupled_q_identity_residual(model, lam, cfg.anchor), tol.identity))
            jump, eq = cp.flux_jump_residual(model, lam, h)
            out.append(_check("flux_jump", lam, jump, tol.flux, equation_residual=eq))
            rep = cp.coupled_report(model, lam)
            out.append(_check("coupled_krein", lam, rep.krein_residual, tol.krein))
            out.append(_check("coupled_trace", lam, rep.trace_gap, tol.trace,
                              lhs=_cz(rep.lhs_trace), rhs=_cz(rep.rhs_trace)))
            out.append(_check("coupled_rank", lam, rep.numerical_rank, model.n_boundary))
            return out, rep
        tasks.append(("coupled", lam, fn))
    if laplacian:
        def bracket():
            b = cp.bracketing_report(model)
            return [_check("dirichlet_bracketing", None, b["min_sum"],
                           b["min_transmission"] - 1e-12, ">=", **b)]
        tasks.append(("bracketing", None, bracket))
    return tasks


def _model_header(model):
    return {"name": model.name, "model_hash": model.model_hash, "n": model.n,
            "n_interior": model.n_interior, "n_boundary": model.n_boundary,
            "n_exterior": model.n_exterior}


def _summary(entries):
    checks = [c for e in entries for c in e["checks"]]
    skipped = [s for e in entries for s in e["skipped"]]
    failed = [c for c in checks if not c["passed"]]
    return {"checks": len(checks), "failed": len(failed), "skipped": len(skipped),
            "passed": not failed}


def run_verify(cfg, coupled_only=False):
    models = build_models(cfg)
    laplacian = _is_laplacian(cfg)
    entries = []
    for model in models:
        if coupled_only:
            if model.partition.exterior is None:
                raise ConfigError(f"couple-verify needs a coupled model, {model.name!r} has no exterior")
            results = _executor_map(
                lambda t: (t[0], t[1], _guarded(t[0], t[1], t[2])),
                _coupled_tasks(model, cfg, laplacian))
            checks, skipped, reports = [], [], []
            for suite, lam, (res, skip) in results:
                if skip is not None:
                    skipped.append(skip)
                    continue
                if isinstance(res, tuple):
                    res, rep = res
                    reports.append(rep.to_dict())
                checks.extend(res)
            entry = _model_header(model)
            entry["bracketing"] = cp.bracketing_report(model)
        else:
            checks, skipped, reports = verify_model(model, cfg, laplacian)
            entry = _model_header(model)
        entry.update(checks=checks, skipped=skipped, krein_reports=reports)
        entries.append(entry)
    return {
        "command": "couple-verify" if coupled_only else "verify",
        "config": cfg.canonical(),
        "models": entries,
        "skipped": [dict(s, model=e["name"]) for e in entries for s in e["skipped"]],
        "summary": _summary(entries),
    }


# ---------------------------------------------------------------------------
# dtn-sweep


def sweep_rows(cfg):
    """Rows of the DtN sweep table, one per (model, lambda)."""
    models = build_models(cfg)
    rows, checks = [], []
    for k, model in enumerate(models):
        coupled = model.partition.exterior is not None
        qfun = (lambda z, m=model: cp.coupled_q(m, z)) if coupled else (
            lambda z, m=model: bm.q_at(m, z))
        try:
            reals = _real_points(model, cfg, coupled)
        except DtnKreinError:
            reals = []
        lams = [complex(z) for z in cfg.points] + _sweep(cfg) + [complex(r) for r in reals]

        def one(lam, qfun=qfun):
            try:
                Q = qfun(lam)
            except NearSingularShift:
                return lam, None
            re_e = np.linalg.eigvalsh(bm.re_part(Q))
            im_e = np.linalg.eigvalsh(bm.im_part(Q))
            sv = np.linalg.svd(Q, compute_uv=False)
            return lam, (re_e[0], re_e[-1], im_e[0], im_e[-1], np.linalg.norm(Q), sv[-1])

        for lam, vals in _executor_map(one, lams):
            rows.append((lam, vals, k))
            if vals is None:
                continue
            scale = max(1.0, vals[4])
            if lam.imag == 0:
                checks.append(_check("real_im_q", lam, max(abs(vals[2]), abs(vals[3])) / scale,
                                     cfg.tol.symmetry))
            elif lam.imag > 0:
                checks.append(_check("im_q_positive", lam, vals[2], -cfg.tol.positivity * abs(lam.imag), ">="))
            else:
                checks.append(_check("im_q_negative", lam, -vals[3], -cfg.tol.positivity * abs(lam.imag), ">="))
    return rows, checks


def format_sweep_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    f = lambda x: format(float(x), ".17g")
    for lam, vals, k in rows:
        if vals is None:
            w.writerow([f(lam.real), f(lam.imag)] + [""] * 6 + ["1", str(k)])
        else:
            w.writerow([f(lam.real), f(lam.imag)] + [f(v) for v in vals] + ["0", str(k)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# characterize


def run_characterize(cfg):
    models = build_models(cfg)
    entries = []
    for model in models:
        entry = _model_header(model)
        try:
            rep = bm.characterization_report(model, cfg.anchor, cfg.eta)
        except NearSingularShift as exc:
            entry.update(checks=[], skipped=[{"suite": "characterize", "lambda": _cz(cfg.anchor),
                                              "reason": str(exc)}])
            entries.append(entry)
            continue
        rep = _jsonable(rep)
        entry["report"] = rep
        entry["checks"] = [_check("alpha", None, rep["alpha"]["max_residual"], cfg.tol.stieltjes)]
        entry["skipped"] = []
        entries.append(entry)
    return {"command": "characterize", "config": cfg.canonical(), "models": entries,
            "skipped": [dict(s, model=e["name"]) for e in entries for s in e["skipped"]],
            "summary": _summary(entries)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return _cz(obj)
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


# ---------------------------------------------------------------------------
# output


def dump_json(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def make_parser():
    p = argparse.ArgumentParser(prog="dtn-krein", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("verify", "run the identity suites and write report.json"),
                        ("dtn-sweep", "tabulate Q(lambda) over a lambda grid into dtn_sweep.csv"),
                        ("characterize", "write characterization.json"),
                        ("couple-verify", "run the coupled (transmission) suite")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", help="key = value configuration file")
        s.add_argument("--out", help="output directory (overrides output.dir)")
        s.add_argument("--seed", type=_u64, help="64-bit seed for random models")
        s.add_argument("--preset", help="model preset (overrides model.preset)")
        s.add_argument("--quiet", action="store_true", help="suppress the summary line")
    return p


OUTPUT_FILES = {"verify": "report.json", "dtn-sweep": "dtn_sweep.csv",
                "characterize": "characterization.json", "couple-verify": "couple_report.json"}


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, preset=args.preset, seed=args.seed, out_dir=args.out)
        if args.command == "verify":
            result = run_verify(cfg)
            text = dump_json(result)
            ok = result["summary"]["passed"]
        elif args.command == "couple-verify":
            if cfg.preset in GRID_PRESETS and cfg.layout != "coupled":
                cfg = replace(cfg, layout="coupled")
            result = run_verify(cfg, coupled_only=True)
            text = dump_json(result)
            ok = result["summary"]["passed"]
        elif args.command == "dtn-sweep":
            rows, checks = sweep_rows(cfg)
            text = format_sweep_csv(rows)
            ok = all(c["passed"] for c in checks)
            result = {"summary": {"checks": len(checks),
                                  "failed": sum(not c["passed"] for c in checks),
                                  "skipped": sum(v is None for _, v, _ in rows)}}
        else:
            result = run_characterize(cfg)
            text = dump_json(result)
            ok = result["summary"]["passed"]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    path = os.path.join(cfg.out_dir, OUTPUT_FILES[args.command])
    write_atomic(path, text)
    if not args.quiet:
        s = result["summary"]
        print(f"{args.command}: {s['checks']} checks, {s['failed']} failed, "
              f"{s['skipped']} skipped -> {path}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
