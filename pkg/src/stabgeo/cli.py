"""Command line interface ``stabgeo``.

Models are JSON files (schema_version 1)::

    {"schema_version": 1, "alpha": 1.5, "kind": "symmetric", "dim": 2,
     "spectral": {"type": "atoms", "directions": [[1, 0], [0, 1]], "weights": [1, 1]}}

Spectral block types: ``atoms`` (directions, optional weights),
``isotropic`` (mass or scale), ``ellipsoid`` (matrix C with
||u||**2 = u'Cu/2) and ``star_body`` (an l_p unit ball given by ``p``, whose
radial function defines a spectral density; optional ``level``).
``kind`` is ``symmetric``, ``onesided`` or ``psum`` (with ``p``).

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 model
parse failure, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Dict, List, Optional

import numpy as np

from . import dependence as dep
from . import geometry as geo
from . import moments as mom
from . import onesided as one
from . import quadrature as qd
from . import simulate as sim
from .spectral import (
    ONESIDED,
    SYMMETRIC,
    EmptyTailError,
    StableModel,
    atoms_model,
    isotropic_model,
    spectral_from_star_body,
    subgaussian_model,
    validate_model,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3, 4
DEFAULTS = {"tolerance": 1e-7, "z_threshold": 3.0, "circle_nodes": 512, "sphere_level": 32}


class ModelConfigError(Exception):
    """Raised with a field path (and line when known) for unusable configs."""


class UsageError(Exception):
    pass


# ------------------------------------------------------------ configs


def _field(cfg: dict, key: str, path: str = ""):
    if key not in cfg:
        raise ModelConfigError(f"{path}{key}: missing field")
    return cfg[key]


def _array(value, path: str, ndim: int) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ModelConfigError(f"{path}: expected numbers") from None
    if arr.ndim != ndim or not np.all(np.isfinite(arr)):
        raise ModelConfigError(f"{path}: expected a finite {ndim}-d array")
    return arr


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ModelConfigError(f"{path}: {exc.strerror}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ModelConfigError(f"{path}: top level must be an object")
    return cfg


def model_from_config(cfg: dict):
    """Build a StableModel (or PSumModel) from a parsed config."""
    version = _field(cfg, "schema_version")
    if version != SCHEMA_VERSION:
        raise ModelConfigError(f"schema_version: unsupported value {version!r}")
    try:
        alpha = float(_field(cfg, "alpha"))
    except (TypeError, ValueError):
        raise ModelConfigError("alpha: expected a number") from None
    kind = {"one-sided": ONESIDED, "p-sum": "psum"}.get(cfg.get("kind", SYMMETRIC), cfg.get("kind", SYMMETRIC))
    if kind not in (SYMMETRIC, ONESIDED, "psum"):
        raise ModelConfigError(f"kind: unknown value {kind!r}")
    spec = _field(cfg, "spectral")
    if not isinstance(spec, dict):
        raise ModelConfigError("spectral: expected an object")
    typ = _field(spec, "type", "spectral.")
    dim = cfg.get("dim")
    try:
        if typ == "atoms":
            D = _array(_field(spec, "directions", "spectral."), "spectral.directions", 2)
            w = spec.get("weights")
            w = None if w is None else _array(w, "spectral.weights", 1)
            if kind == "psum":
                p = float(_field(cfg, "p"))
                model = one.psum_model(p, alpha, D, w)
            elif kind == ONESIDED:
                model = one.onesided_model(alpha, D, w)
            else:
                model = atoms_model(alpha, D, w)
        elif typ == "isotropic":
            d = int(_field(cfg, "dim"))
            if "mass" in spec:
                from .spectral import Isotropic

                model = StableModel(alpha, Isotropic(float(spec["mass"])), d)
            else:
                model = isotropic_model(alpha, d, float(spec.get("scale", 1.0)))
        elif typ == "ellipsoid":
            C = _array(_field(spec, "matrix", "spectral."), "spectral.matrix", 2)
            if C.shape[0] != C.shape[1] or not np.allclose(C, C.T):
                raise ModelConfigError("spectral.matrix: must be square and symmetric")
            if np.linalg.eigvalsh(C).min() <= 0:
                raise ModelConfigError("spectral.matrix: must be positive definite")
            model = subgaussian_model(C, alpha)
        elif typ == "star_body":
            d = int(_field(cfg, "dim"))
            p = float(_field(spec, "p", "spectral."))
            if d == 2:
                rule = qd.circle_rule(int(spec.get("level", DEFAULTS["circle_nodes"])))
            else:
                rule = qd.sphere_rule(d, int(spec.get("level", DEFAULTS["sphere_level"])))
            dens = spectral_from_star_body(lambda U: np.linalg.norm(U, ord=p, axis=1), alpha, rule)
            model = StableModel(alpha, dens, d)
        else:
            raise ModelConfigError(f"spectral.type: unknown value {typ!r}")
    except ModelConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ModelConfigError(f"spectral: {exc}") from None
    core = model.core if isinstance(model, one.PSumModel) else model
    if dim is not None and int(dim) != core.dim:
        raise ModelConfigError(f"dim: {dim} does not match the spectral block ({core.dim})")
    errors = [dg for dg in validate_model(core) if dg.severity == "error"]
    if errors:
        raise ModelConfigError("; ".join(f"{dg.code}: {dg.message}" for dg in errors))
    return model


def model_to_config(model: StableModel) -> dict:
    sp = model.spectral
    return {
        "schema_version": SCHEMA_VERSION,
        "alpha": model.alpha,
        "kind": model.kind,
        "dim": model.dim,
        "spectral": {
            "type": "atoms",
            "directions": np.asarray(sp.directions).tolist(),
            "weights": np.asarray(sp.weights).tolist(),
        },
    }


def load_model(path: str):
    return model_from_config(load_config(path))


# ------------------------------------------------------------ reports


def _plain(x):
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def emit(report: dict, fmt: str, out=None) -> None:
    out = sys.stdout if out is None else out
    report = _plain(report)
    if fmt == "json":
        out.write(json.dumps(report, sort_keys=True) + "\n")
        return
    for key in sorted(report):
        val = report[key]
        if isinstance(val, (dict, list)):
            val = json.dumps(val, sort_keys=True)
        out.write(f"{key}: {val}\n")


def _floats(text: Optional[str], name: str) -> np.ndarray:
    if text is None:
        raise UsageError(f"--{name} is required")
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise UsageError(f"--{name}: expected comma-separated numbers") from None


def _params(text: Optional[str]) -> Dict[str, str]:
    out = {}
    if not text:
        return out
    for tok in text.split(";"):
        if not tok.strip():
            continue
        k, sep, v = tok.partition("=")
        if not sep:
            raise UsageError(f"--params: expected key=value, got {tok!r}")
        out[k.strip()] = v.strip()
    return out


def _symmetric(model) -> StableModel:
    if isinstance(model, one.PSumModel) or model.kind != SYMMETRIC:
        raise UsageError("this command needs a symmetric model")
    return model


# ------------------------------------------------------------ commands


def cmd_validate(args) -> int:
    model = load_model(args.model)
    core = model.core if isinstance(model, one.PSumModel) else model
    diags = validate_model(core)
    emit({"operation": "validate", "valid": True, "fingerprint": core.fingerprint(),
          "warnings": [f"{d.code}: {d.message}" for d in diags]}, args.format)
    return EXIT_OK


def cmd_gauge(args) -> int:
    model = _symmetric(load_model(args.model))
    u = _floats(args.u, "u")
    emit({"operation": "gauge", "u": u, "value": geo.gauge(model, u), "error": 0.0}, args.format)
    return EXIT_OK


def cmd_volume(args) -> int:
    model = _symmetric(load_model(args.model))
    res = geo.volume(model)
    emit({"operation": "volume", "value": res.value, "error": res.error}, args.format)
    return EXIT_OK


def cmd_density(args) -> int:
    model = _symmetric(load_model(args.model))
    x = _floats(args.x, "x")
    res = mom.density(model, x)
    emit({"operation": "density", "x": x, "value": res.value, "error": res.error,
          "formula": res.formula}, args.format)
    return EXIT_OK


def _moment(model, kind: str, prm: Dict[str, str]):
    def num(key, default=None):
        if key not in prm:
            if default is None:
                raise UsageError(f"--params needs {key}")
            return default
        return float(prm[key])

    if kind == "onesided":
        if model.kind != ONESIDED:
            raise UsageError("onesided moments need a one-sided model")
        u = _floats(prm.get("u"), "params u")
        if "beta" in prm:
            return one.onesided_moment_pos(model, u, num("beta")), 0.0, "onesided-positive"
        return one.onesided_moment_neg(model, u, num("lambda")), 0.0, "onesided-negative"
    model = _symmetric(model)
    if kind == "norm":
        r = mom.norm_moment(model, num("lambda"))
    elif kind == "scalar":
        r = mom.scalar_moment(model, _floats(prm.get("u"), "params u"), num("lambda"))
    elif kind == "mixed":
        if prm.get("signed", "false").lower() in ("1", "true", "yes"):
            r = mom.signed_mixed_moment_2d(model, num("lambda1"), num("lambda2"))
        else:
            r = mom.mixed_abs_moment_2d(model, num("lambda1"), num("lambda2"))
    elif kind == "sign":
        r = mom.sign_moment_2d(model)
    elif kind == "orthant":
        A = _floats(prm["A"], "params A").reshape(2, 2) if "A" in prm else None
        r = mom.orthant_probability_2d(model, A)
    else:
        raise UsageError(f"unknown moment kind {kind!r}")
    return r.value, r.error, r.formula


def cmd_moment(args) -> int:
    model = load_model(args.model)
    val, err, formula = _moment(model, args.kind, _params(args.params))
    emit({"operation": f"moment-{args.kind}", "params": args.params or "", "value": val,
          "error": err, "formula": formula}, args.format)
    return EXIT_OK


def cmd_covariation(args) -> int:
    model = _symmetric(load_model(args.model))
    val = dep.covariation(model, _floats(args.u1, "u1"), _floats(args.u2, "u2"))
    emit({"operation": "covariation", "value": val, "error": 0.0}, args.format)
    return EXIT_OK


def cmd_regress(args) -> int:
    model = _symmetric(load_model(args.model))
    res = dep.regression_linearity_check(model, args.axis, tol=args.tol)
    rep = {"operation": "regress", "axis": args.axis, "linear": res.is_linear,
           "a": res.a, "residual": res.residual}
    if model.dim == 2:
        rep["slope"] = -res.a[1 - args.axis]
    emit(rep, args.format)
    return EXIT_OK


def cmd_james(args) -> int:
    model = _symmetric(load_model(args.model))
    if args.strong:
        if not args.split:
            raise UsageError("--strong needs --split d1,d2")
        d1, d2 = (int(t) for t in args.split.split(","))
        res = dep.strong_james_check(model, d1, d2, tol=args.tol)
        emit({"operation": "james-strong", "strong": res.strong, "weak": res.weak,
              "margin": res.margin}, args.format)
    else:
        res = dep.james_orthogonal_bivariate(model, tol=args.tol)
        emit({"operation": "james", "orthogonal": res.orthogonal, "margin": res.margin,
              "covariation": res.covariation}, args.format)
    return EXIT_OK


def cmd_onesided(args) -> int:
    if args.action == "cdf":
        Y = np.array(json.loads(args.atoms), dtype=float)
        w = _floats(args.weights, "weights") if args.weights else np.ones(Y.shape[0])
        val = one.maxstable_cdf(Y, w, _floats(args.u, "u"))
        emit({"operation": "maxstable-cdf", "value": val, "error": 0.0}, args.format)
        return EXIT_OK
    if not args.model:
        raise UsageError("a model file is required")
    model = load_model(args.model)
    if args.action == "laplace":
        u = _floats(args.u, "u")
        if isinstance(model, one.PSumModel):
            val = one.psum_character(model, u)
        else:
            val = one.laplace(model, u)
        emit({"operation": "laplace", "u": u, "value": val, "error": 0.0}, args.format)
        return EXIT_OK
    val, err, formula = _moment(model, "onesided", _params(args.params))
    emit({"operation": "onesided-moment", "value": val, "error": err, "formula": formula}, args.format)
    return EXIT_OK


def cmd_simulate(args) -> int:
    model = load_model(args.model)
    if isinstance(model, one.PSumModel):
        data = sim.sample_psum(model, args.n, args.seed)
        batch = sim.SampleBatch(data, args.seed, model.core.fingerprint(), model.alpha, "psum")
    else:
        batch = sim.sample_vector(model, args.n, args.seed)
    batch.to_csv(args.output)
    emit({"operation": "simulate", "n": args.n, "seed": args.seed, "fingerprint": batch.fingerprint,
          "output": args.output}, args.format)
    return EXIT_OK


def cmd_estimate(args) -> int:
    try:
        batch = sim.SampleBatch.from_csv(args.samples)
    except OSError as exc:
        raise EmptyTailError(f"{args.samples}: {exc.strerror}") from None
    X = batch.data
    if X.size == 0:
        raise EmptyTailError("sample file has no rows")
    alpha = args.alpha if args.alpha is not None else batch.alpha
    if not np.isfinite(alpha):
        raise UsageError("--alpha is required when the sample file has no header")
    from .estimators import SpectralMeasureEstimator

    est = SpectralMeasureEstimator(alpha=alpha, threshold=args.t, n_bins=args.bins).fit(X)
    cfg = model_to_config(est.model_)
    with open(args.output, "w") as fh:
        json.dump(cfg, fh, indent=1, sort_keys=True)
    emit({"operation": "estimate", "threshold": est.threshold_, "exceedances": est.n_exceed_,
          "atoms": len(est.spectral_.weights), "output": args.output}, args.format)
    return EXIT_OK


def cmd_portfolio(args) -> int:
    model = _symmetric(load_model(args.model))
    res = dep.portfolio_direction(model, _floats(args.mu, "mu"), args.r, args.lam, args.sense)
    emit({"operation": "portfolio", "u": res.u, "gauge": res.gauge, "moment": res.moment,
          "stationary": res.stationary}, args.format)
    return EXIT_OK


# ------------------------------------------------------------ verification


def _check(name, formula, mc, se, z_thr, ferr=0.0) -> dict:
    formula, mc, se = float(formula), float(mc), float(se)
    z = float(sim.zscore(formula, mc, se, ferr))
    return {"name": name, "formula": formula, "mc": mc, "se": se, "z": z, "pass": bool(z < z_thr)}


def verify_model(model, n: int, seed: int, suite: str = "all", z_thr: float = 3.0) -> List[dict]:
    """Formula-vs-simulation checks applicable to the model."""
    out = []
    if isinstance(model, one.PSumModel):
        model = model.core
    if model.kind == ONESIDED:
        if suite not in ("all", "onesided"):
            return out
        X = sim.sample_onesided(model, n, seed).data
        d = model.dim
        rng = np.random.default_rng(seed)
        for i, u in enumerate(rng.uniform(0.2, 2.0, size=(4, d))):
            m, s = sim.mean_se(np.exp(-(X @ u)))
            out.append(_check(f"laplace[{i}]", float(one.laplace(model, u)), m, s, z_thr))
        u = np.ones(d)
        beta = 0.25 * model.alpha
        m, s = sim.mean_se((X @ u) ** beta)
        out.append(_check("moment-positive", one.onesided_moment_pos(model, u, beta), m, s, z_thr))
        m, s = sim.mean_se((X @ u) ** -1.0)
        out.append(_check("moment-negative", one.onesided_moment_neg(model, u, 0.0), m, s, z_thr))
        return out
    X = sim.sample_vector(model, n, seed).data
    d, a = model.dim, model.alpha
    if suite in ("all", "moments"):
        lam = 0.4 * a
        r = np.linalg.norm(X, axis=1)
        f = mom.norm_moment(model, lam)
        m, s = sim.mean_se(r**lam)
        out.append(_check("norm-moment", f.value, m, s, z_thr, f.error))
        f = mom.norm_moment(model, -0.5)
        m, s = sim.mean_se(r**-0.5)
        out.append(_check("norm-moment-negative", f.value, m, s, z_thr, f.error))
        u = np.linspace(1.0, 0.5, d)
        f = mom.scalar_moment(model, u, lam)
        m, s = sim.mean_se(np.abs(X @ u) ** lam)
        out.append(_check("scalar-moment", f.value, m, s, z_thr))
        if d in (2, 3):
            f = mom.ball_probability(model, 1.0)
            m, s = sim.mean_se(r <= 1.0)
            out.append(_check("ball-probability", f.value, m, s, z_thr, f.error))
            f = mom.box_probability(model, np.ones(d))
            m, s = sim.mean_se(np.all(np.abs(X) <= 1.0, axis=1))
            out.append(_check("box-probability", f.value, m, s, z_thr, f.error))
            f = mom.laplace_abs(model, np.ones(d))
            m, s = sim.mean_se(np.exp(-np.abs(X).sum(axis=1)))
            out.append(_check("laplace-abs", f.value, m, s, z_thr, f.error))
            f = mom.intersection_body_moment(model)
            m, s = sim.mean_se(mom.intersection_body_functional(model, X[: min(n, 200_000)]))
            out.append(_check("intersection-body", f.value, m, s, z_thr, f.error))
        if d == 2:
            f = mom.sign_moment_2d(model)
            m, s = sim.mean_se(np.sign(X[:, 0] * X[:, 1]))
            out.append(_check("sign-moment", f.value, m, s, z_thr, f.error))
            l1, l2 = 0.15 * a, 0.2 * a
            f = mom.mixed_abs_moment_2d(model, l1, l2)
            m, s = sim.mean_se(np.abs(X[:, 0]) ** l1 * np.abs(X[:, 1]) ** l2)
            out.append(_check("mixed-moment", f.value, m, s, z_thr, f.error))
            f = mom.signed_mixed_moment_2d(model, l1, l2)
            v = np.sign(X[:, 0] * X[:, 1]) * np.abs(X[:, 0]) ** l1 * np.abs(X[:, 1]) ** l2
            m, s = sim.mean_se(v)
            out.append(_check("signed-mixed-moment", f.value, m, s, z_thr, f.error))
            f = mom.orthant_probability_2d(model)
            m, s = sim.mean_se((X[:, 0] > 0) & (X[:, 1] > 0))
            out.append(_check("orthant-probability", f.value, m, s, z_thr, f.error))
    if suite in ("all", "dependence") and a > 1.0:
        U = qd.fibonacci_directions(8) if d >= 3 else qd.circle_rule(16).nodes[:8]
        est, se = sim.estimate_zonoid_from_samples(X, a, U)
        c = sim.zonoid_scale(a)
        g = geo.gauge(model, U)
        for i in range(U.shape[0]):
            out.append(_check(f"zonoid-support[{i}]", float(g[i]), c * est[i], c * se[i], z_thr))
        if d == 2:
            num = sim.tail_corrected_values(X[:, 0] * np.sign(X[:, 1]), a)
            den = sim.tail_corrected_values(np.abs(X[:, 1]), a)
            ratio, se_r = sim.ratio_mean(num, den)
            e2 = np.array([0.0, 1.0])
            cov_ratio = dep.covariation(model, [1.0, 0.0], e2) / dep.covariation(model, e2, e2)
            out.append(_check("covariation-ratio", cov_ratio, ratio, se_r, z_thr))
    return out


def cmd_verify(args) -> int:
    model = load_model(args.model)
    checks = verify_model(model, args.n, args.seed, args.suite, args.z)
    ok = all(c["pass"] for c in checks)
    if args.format == "json":
        emit({"operation": "verify", "suite": args.suite, "n": args.n, "seed": args.seed,
              "checks": checks, "pass": ok}, "json")
    else:
        for c in checks:
            status = "PASS" if c["pass"] else "FAIL"
            print(f"{status} {c['name']} formula={c['formula']!r} mc={c['mc']!r} se={c['se']!r} z={c['z']:.3f}")
        print(f"{'PASS' if ok else 'FAIL'} verify {len(checks)} checks")
    return EXIT_OK if ok else EXIT_VERIFY


# ------------------------------------------------------------ entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stabgeo", description="Geometry and moments of stable laws.")
    p.add_argument("--format", choices=["text", "json"], default="text")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default=argparse.SUPPRESS)

    def add(name, func, model=True):
        sp = sub.add_parser(name, parents=[common])
        if model:
            sp.add_argument("model")
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate)
    add("gauge", cmd_gauge).add_argument("--u", required=True)
    add("volume", cmd_volume)
    add("density", cmd_density).add_argument("--x", required=True)
    s = add("moment", cmd_moment)
    s.add_argument("--kind", required=True, choices=["norm", "scalar", "mixed", "sign", "orthant", "onesided"])
    s.add_argument("--params", default="")
    s = add("covariation", cmd_covariation)
    s.add_argument("--u1", required=True)
    s.add_argument("--u2", required=True)
    s = add("regress", cmd_regress)
    s.add_argument("--axis", type=int, default=0)
    s.add_argument("--tol", type=float, default=DEFAULTS["tolerance"])
    s = add("james", cmd_james)
    s.add_argument("--strong", action="store_true")
    s.add_argument("--split")
    s.add_argument("--tol", type=float, default=DEFAULTS["tolerance"])
    s = add("onesided", cmd_onesided, model=False)
    s.add_argument("action", choices=["laplace", "cdf", "moment"])
    s.add_argument("model", nargs="?")
    s.add_argument("--u")
    s.add_argument("--params", default="")
    s.add_argument("--atoms", help="JSON list of atom vectors for cdf")
    s.add_argument("--weights")
    s = add("simulate", cmd_simulate)
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output", required=True)
    s = add("estimate", cmd_estimate, model=False)
    s.add_argument("--samples", required=True)
    s.add_argument("-t", type=float, required=True)
    s.add_argument("-o", "--output", default="estimated.json")
    s.add_argument("--alpha", type=float)
    s.add_argument("--bins", type=int)
    s = add("portfolio", cmd_portfolio)
    s.add_argument("--mu", required=True)
    s.add_argument("-r", type=float, required=True)
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--sense", choices=["min", "max"], default="min")
    s = add("verify", cmd_verify)
    s.add_argument("--suite", choices=["all", "moments", "dependence", "onesided"], default="all")
    s.add_argument("-n", type=int, default=1_000_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--z", type=float, default=DEFAULTS["z_threshold"])
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except ModelConfigError as exc:
        print(f"error: model: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (EmptyTailError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
