"""Command-line front end.

Subcommands
-----------
generate   write a synthetic sample cloud to CSV
estimate   run subspace-constrained mean shift on a cloud, report metrics
sweep      grid of (method, q, h) runs with one metrics row per cell
field      cosine scores s(x) and normal directions of Gamma(q, x) on a grid
verify     run the numerical property suites
denoise    corrupt a clean cloud in its PCA frame, estimate, report MSE

Every command accepts ``--config FILE`` with plain ``key = value`` lines
(same keys as the long flags); explicit flags override the file.  All CSV
outputs carry a header row and full round-trip float precision.  Exit codes:
0 success, 1 verification failure, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

from . import datagen
from .cloud import PointCloud
from .density import KdeModel
from .exceptions import InvalidInput, RidgeKitError
from .metrics import (CircleManifold, SphereManifold, denoise_mse,
                      hausdorff_to_projection, margin, pca_subspace)
from .ridge import normal_field
from .scms import ScmsConfig, run as scms_run
from .verify import SUITES, run_suites


class ConfigError(Exception):
    """Bad flags or config file; exits with status 2."""


class InputError(Exception):
    """Unreadable or malformed input file; exits with status 3."""


class VerificationFailure(Exception):
    """One or more verify suites failed; exits with status 1."""


def _floats(text: str):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}") from exc


def _strs(text: str):
    return [tok.strip() for tok in text.split(",") if tok.strip() != ""]


@dataclass(frozen=True)
class Opt:
    name: str
    type: object
    default: object = None
    help: str = ""
    required: bool = False
    choices: tuple | None = None


_METHODS = ("score", "l-score", "mfit-i", "mfit-ii")

_SCMS_OPTS = [
    Opt("method", str, "score", "estimator variant", choices=_METHODS),
    Opt("q", float, 0.0, "power exponent for score / l-score"),
    Opt("d", int, 1, "ridge dimension"),
    Opt("h", float, None, "kernel bandwidth for score / l-score"),
    Opt("neighbors", int, None, "neighbor count for l-score"),
    Opt("radius", float, None, "neighborhood radius for mfit methods"),
    Opt("knn-scale", int, None, "derive h / radius from the K-th nearest sample"),
    Opt("kappa", float, 1.0, "step size in (0, 1]"),
    Opt("epsilon", float, None, "convergence tolerance (default 1e-7 * data diameter)"),
    Opt("max-iters", int, 500, "iteration cap per point"),
]

COMMANDS = {
    "generate": [
        Opt("shape", str, required=True, help="cloud shape",
            choices=("circle", "sphere", "swiss-roll", "bimodal")),
        Opt("m", int, 200, "number of points"),
        Opt("sigma", float, 0.0, "noise standard deviation"),
        Opt("seed", int, 0, "64-bit generator seed"),
        Opt("radius", float, 1.0, "circle / sphere radius"),
        Opt("a", float, 1.5, "bimodal mode separation"),
        Opt("out", str, required=True, help="output CSV path"),
    ],
    "estimate": [
        Opt("input", str, required=True, help="input cloud CSV"),
        Opt("out", str, required=True, help="output result CSV"),
        Opt("reference", str, None, "reference manifold circle:R or sphere:R"),
        *_SCMS_OPTS,
    ],
    "sweep": [
        Opt("shape", str, "circle", "synthetic cloud shape", choices=("circle", "sphere")),
        Opt("m", int, 200, "number of points"),
        Opt("sigma", float, 0.1, "noise standard deviation"),
        Opt("seed", int, 0, "generator seed"),
        Opt("radius", float, 1.0, "manifold radius"),
        Opt("d", int, 1, "ridge dimension"),
        Opt("h-grid", _floats, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
            "bandwidths (doubles as the mfit radius)"),
        Opt("methods", _strs, ["l-score"], "methods to sweep"),
        Opt("q-list", _floats, [0.0], "q values for score / l-score rows"),
        Opt("neighbors", int, 30, "neighbor count for l-score"),
        Opt("kappa", float, 1.0, "step size in (0, 1]"),
        Opt("max-iters", int, 500, "iteration cap per point"),
        Opt("out", str, required=True, help="output table CSV"),
    ],
    "field": [
        Opt("input", str, required=True, help="2-D input cloud CSV"),
        Opt("h", float, required=True, help="kernel bandwidth"),
        Opt("q-list", _floats, [-1.0, 0.0, 0.5, 1.0], "q values, one output file each"),
        Opt("box", str, "-2:2", "grid bounds lo:hi or l0:h0,l1:h1"),
        Opt("resolution", int, 41, "grid nodes per axis"),
        Opt("out-prefix", str, required=True, help="output files <prefix><q>.csv"),
    ],
    "verify": [
        Opt("suite", str, "all", "suite to run", choices=("all",) + tuple(sorted(SUITES))),
        Opt("trials", int, None, "override trial count for randomized suites"),
        Opt("seed", int, None, "override seed for randomized suites"),
    ],
    "denoise": [
        Opt("input", str, required=True, help="clean cloud CSV"),
        Opt("k", int, required=True, help="PCA subspace dimension"),
        Opt("sigma", float, 0.1, "corruption noise level in the PCA frame"),
        Opt("seed", int, 0, "corruption seed"),
        Opt("method", str, "l-score", "estimator variant or identity pass-through",
            choices=_METHODS + ("identity",)),
        Opt("q", float, 0.8, "power exponent for score / l-score"),
        Opt("d", int, 1, "ridge dimension in the PCA frame"),
        Opt("h", float, None, "kernel bandwidth for score / l-score"),
        Opt("neighbors", int, None, "neighbor count for l-score"),
        Opt("radius", float, None, "neighborhood radius for mfit methods"),
        Opt("knn-scale", int, None, "derive h / radius from the K-th nearest sample"),
        Opt("kappa", float, 1.0, "step size in (0, 1]"),
        Opt("max-iters", int, 500, "iteration cap per point"),
    ],
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ridgekit",
        description="Density ridge estimation under power transformations.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, opts in COMMANDS.items():
        p = sub.add_parser(name, help=f"{name} command")
        p.add_argument("--config", default=argparse.SUPPRESS,
                       help="key = value file; explicit flags win")
        for opt in opts:
            extra = {}
            if opt.choices:
                extra["choices"] = opt.choices
            default_note = "" if opt.default is None else f" (default: {opt.default})"
            p.add_argument(f"--{opt.name}", dest=opt.name.replace("-", "_"),
                           type=opt.type, default=argparse.SUPPRESS,
                           help=opt.help + default_note, **extra)
    return parser


def _read_config(path):
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _merge(command, namespace):
    """Flags > config file > declared defaults; returns a plain dict."""
    provided = dict(vars(namespace))
    provided.pop("command", None)
    config_path = provided.pop("config", None)
    opts = {o.name.replace("-", "_"): o for o in COMMANDS[command]}
    values = {key: opt.default for key, opt in opts.items()}
    if config_path is not None:
        for key, raw in _read_config(config_path).items():
            if key not in opts:
                raise ConfigError(f"config key {key!r} unknown to command {command!r}")
            opt = opts[key]
            try:
                value = opt.type(raw)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(f"config key {key!r}: {exc}") from exc
            if opt.choices and value not in opt.choices:
                raise ConfigError(f"config key {key!r}: {value!r} not in {opt.choices}")
            values[key] = value
    values.update(provided)
    for key, opt in opts.items():
        if opt.required and values[key] is None:
            raise ConfigError(f"--{opt.name} is required")
    return values


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


def _load_cloud(path):
    try:
        return PointCloud.from_csv(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except InvalidInput as exc:
        raise InputError(str(exc)) from exc


def _parse_reference(text):
    kind, _, value = text.partition(":")
    try:
        radius = float(value)
    except ValueError:
        raise ConfigError(f"--reference expects circle:R or sphere:R, got {text!r}")
    if kind == "circle":
        return CircleManifold(radius)
    if kind == "sphere":
        return SphereManifold(radius)
    raise ConfigError(f"--reference kind must be circle or sphere, got {kind!r}")


def _scms_config(values):
    try:
        return ScmsConfig(method=values["method"], q=values["q"], d=values["d"],
                          bandwidth=values["h"], neighbors=values["neighbors"],
                          radius=values["radius"], knn_scale=values["knn_scale"],
                          kappa=values["kappa"], epsilon=values.get("epsilon"),
                          max_iters=values["max_iters"])
    except InvalidInput as exc:
        raise ConfigError(str(exc)) from exc


def cmd_generate(values) -> int:
    _require(values["m"] >= 1, f"--m must be >= 1 (got {values['m']})")
    _require(values["sigma"] >= 0, f"--sigma must be >= 0 (got {values['sigma']})")
    _require(values["radius"] > 0, f"--radius must be > 0 (got {values['radius']})")
    _require(values["a"] >= 0, f"--a must be >= 0 (got {values['a']})")
    noise = datagen.NoiseSpec(sigma=values["sigma"], seed=values["seed"])
    shape = values["shape"]
    if shape == "circle":
        cloud = datagen.sample_circle(values["m"], values["radius"], noise)
    elif shape == "sphere":
        cloud = datagen.sample_sphere(values["m"], values["radius"], noise)
    elif shape == "swiss-roll":
        cloud = datagen.sample_swiss_roll_2d(values["m"], noise)
    else:
        cloud = datagen.sample_bimodal(values["m"], values["a"], noise)
    cloud.to_csv(values["out"])
    print(f"wrote {len(cloud)} points to {values['out']}")
    return 0


def cmd_estimate(values) -> int:
    cloud = _load_cloud(values["input"])
    config = _scms_config(values)
    try:
        result = scms_run(config, cloud)
    except InvalidInput as exc:
        raise ConfigError(str(exc)) from exc
    result.to_csv(values["out"])
    rate = float(result.converged.mean())
    print(f"converged {result.converged.sum()}/{len(cloud)} points "
          f"(rate {rate:.3f}), result written to {values['out']}")
    if values["reference"] is not None:
        manifold = _parse_reference(values["reference"])
        marg = margin(result.output, manifold)
        haus = hausdorff_to_projection(result.output, manifold)
        print(f"marg={marg!r} haus={haus!r}")
    return 0


def cmd_sweep(values) -> int:
    _require(values["m"] >= 1, f"--m must be >= 1 (got {values['m']})")
    _require(values["sigma"] >= 0, f"--sigma must be >= 0 (got {values['sigma']})")
    _require(values["radius"] > 0, f"--radius must be > 0 (got {values['radius']})")
    for method in values["methods"]:
        _require(method in _METHODS, f"--methods entry {method!r} not in {_METHODS}")
    noise = datagen.NoiseSpec(sigma=values["sigma"], seed=values["seed"])
    if values["shape"] == "circle":
        cloud = datagen.sample_circle(values["m"], values["radius"], noise)
        manifold = CircleManifold(values["radius"])
    else:
        cloud = datagen.sample_sphere(values["m"], values["radius"], noise)
        manifold = SphereManifold(values["radius"])
    rows = []
    succeeded = 0
    for method in values["methods"]:
        q_cells = values["q_list"] if method in ("score", "l-score") else [None]
        for q in q_cells:
            for h in values["h_grid"]:
                row = {"method": method, "q": "" if q is None else repr(float(q)),
                       "h": repr(float(h)),
                       "neighbors": values["neighbors"] if method == "l-score" else "",
                       "radius": repr(float(h)) if method.startswith("mfit") else ""}
                try:
                    config = ScmsConfig(
                        method=method, q=0.0 if q is None else q, d=values["d"],
                        bandwidth=None if method.startswith("mfit") else h,
                        neighbors=values["neighbors"] if method == "l-score" else None,
                        radius=h if method.startswith("mfit") else None,
                        kappa=values["kappa"], max_iters=values["max_iters"])
                    result = scms_run(config, cloud)
                    row["marg"] = repr(margin(result.output, manifold))
                    row["haus"] = repr(hausdorff_to_projection(result.output, manifold))
                    row["status"] = "ok"
                    succeeded += 1
                except RidgeKitError as exc:
                    row["marg"] = row["haus"] = ""
                    row["status"] = f"error: {exc}"
                rows.append(row)
    header = ["method", "q", "h", "neighbors", "radius", "marg", "haus", "status"]
    with open(values["out"], "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=header)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} sweep rows ({succeeded} ok) to {values['out']}")
    return 0 if succeeded else 1


def _parse_box(text):
    spans = []
    for part in text.split(","):
        lo, _, hi = part.partition(":")
        try:
            spans.append((float(lo), float(hi)))
        except ValueError:
            raise ConfigError(f"--box expects lo:hi pairs, got {text!r}")
    return spans[0] if len(spans) == 1 else spans


def cmd_field(values) -> int:
    cloud = _load_cloud(values["input"])
    _require(cloud.dim == 2, f"field grids need a 2-D cloud, got D={cloud.dim}")
    _require(values["h"] > 0, f"--h must be > 0 (got {values['h']})")
    _require(values["resolution"] >= 2, f"--resolution must be >= 2 (got {values['resolution']})")
    model = KdeModel(cloud, values["h"])
    box = _parse_box(values["box"])
    for q in values["q_list"]:
        field = normal_field(model, q, box, values["resolution"])
        path = f"{values['out_prefix']}{q:g}.csv"
        field.to_csv(path)
        defined = int(np.sum(~np.isnan(field.s)))
        print(f"q={q:g}: wrote {field.points.shape[0]} nodes ({defined} with s) to {path}")
    return 0


def cmd_verify(values) -> int:
    names = None if values["suite"] == "all" else [values["suite"]]
    results = run_suites(names, trials=values["trials"], seed=values["seed"])
    for result in results:
        print(result.summary())
    failed = [r for r in results if not r.passed]
    if failed:
        raise VerificationFailure(f"{len(failed)} suite(s) failed")
    print(f"all {len(results)} suite(s) passed")
    return 0


def cmd_denoise(values) -> int:
    cloud = _load_cloud(values["input"])
    _require(1 <= values["k"] <= cloud.dim,
             f"--k must be within 1..{cloud.dim} (got {values['k']})")
    _require(values["sigma"] >= 0, f"--sigma must be >= 0 (got {values['sigma']})")
    basis = pca_subspace(cloud, values["k"])
    frame = cloud.points @ basis
    corrupted = datagen.add_noise(frame, values["sigma"], values["seed"])
    baseline = denoise_mse(cloud, corrupted, basis)
    if values["method"] == "identity":
        estimated = corrupted
    else:
        config = _scms_config(values)
        try:
            result = scms_run(config, corrupted)
        except InvalidInput as exc:
            raise ConfigError(str(exc)) from exc
        estimated = result.output.points
    mse = denoise_mse(cloud, estimated, basis)
    print(f"mse={mse!r} baseline={baseline!r}")
    return 0


_HANDLERS = {
    "generate": cmd_generate,
    "estimate": cmd_estimate,
    "sweep": cmd_sweep,
    "field": cmd_field,
    "verify": cmd_verify,
    "denoise": cmd_denoise,
}


def main(argv=None) -> int:
    parser = _build_parser()
    namespace = parser.parse_args(argv)
    try:
        values = _merge(namespace.command, namespace)
        return _HANDLERS[namespace.command](values)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except VerificationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
