"""Command-line surface and report assembly.

Subcommands: dim, curvature, gap, fisher, spectral, validate, all.
Configuration is an INI-style file (section headers, key = value) with
flag overrides; every run writes OUT/manifest.json plus one JSON and
one CSV per command. Reruns with the same config/seed are byte
identical except for the manifest timestamp.
"""

import argparse
import configparser
import datetime
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import curvature as curv
from . import intrinsic_dim as idim
from . import io as sio
from . import margins as mg
from . import spectral as spec
from . import synthetic as syn
from .errors import SemgeomError
from .fisher import fisher_matrix
from .knn import build_neighbor_table

SCHEMA_VERSION = 1


def _load_config(path):
    cp = configparser.ConfigParser()
    if path is not None:
        read = cp.read(path)
        if not read:
            raise SemgeomError(f"config file not found: {path}")
    return cp

def _section(cp, name):
    return dict(cp[name]) if cp.has_section(name) else {}


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


def _write_report(out_dir, name, report, csv_header, csv_rows, fmt):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt in ("json", "both"):
        with open(out_dir / f"{name}.json", "w") as f:
            json.dump(report, f, indent=2, sort_keys=True, default=_json_default)
            f.write("\n")
    if fmt in ("csv", "both") and csv_header is not None:
        sio.write_csv_table(csv_rows, out_dir / f"{name}.csv", header=csv_header)


def run_dim(cfg, workers=1, seed=0):
    layers = sorted(
        (int(k[len("layer"):]), v) for k, v in cfg.items() if k.startswith("layer")
    )
    if len(layers) < 2:
        raise SemgeomError("dim config needs at least two layer<i> = path entries")
    estimator = cfg.get("estimator", "two_nn")
    k = int(cfg.get("k", 20))
    clouds = []
    for li, path in layers:
        try:
            clouds.append(sio.load_cloud(path, expected_layer=li))
        except (OSError, SemgeomError) as e:
            raise SemgeomError(f"layer {li}: {e}") from e
    profile = idim.layer_profile(clouds, estimator=estimator, k=k, workers=workers)
    per_layer = []
    for li, est in zip(profile.layer_indices, profile.estimates):
        per_layer.append({
            "layer": li,
            "estimator": estimator,
            "value": None if est is None else est.value,
            "n_used": None if est is None else est.n_used,
            "params": None if est is None else est.params,
            "error": profile.errors.get(li),
        })
    report = {
        "schema": SCHEMA_VERSION,
        "ambient_d": profile.ambient_d,
        "peak_layer": profile.peak_layer,
        "peak_value": profile.peak_value,
        "utilization": profile.utilization,
        "final_value": profile.final_value,
        "layers": per_layer,
    }
    header = ["layer", "estimator", "value", "n_used", "params"]
    rows = [
        (r["layer"], r["estimator"],
         "" if r["value"] is None else r["value"],
         "" if r["n_used"] is None else r["n_used"],
         json.dumps(r["params"], sort_keys=True))
        for r in per_layer
    ]
    return report, header, rows


def run_curvature(cfg, workers=1, seed=0):
    cloud = sio.load_cloud(cfg["cloud"])
    intrinsic_k = int(cfg.get("intrinsic_k", 2))
    nsize = int(cfg.get("neighborhood_size", curv.default_neighborhood_size(intrinsic_k)))
    table = build_neighbor_table(cloud, min(nsize, cloud.n - 1), workers=workers)
    pca = curv.local_pca_curvature(cloud, table, nsize, intrinsic_k)
    ii = curv.second_fundamental_norm(cloud, table, nsize, intrinsic_k)
    pvals = np.array([s.pca_curvature for s in pca])
    ivals = np.array([s.ii_norm for s in ii])
    report = {
        "schema": SCHEMA_VERSION,
        "intrinsic_k": intrinsic_k,
        "neighborhood_size": nsize,
        "pca_curvature": {
            "median": float(np.median(pvals)),
            "q25": float(np.percentile(pvals, 25)),
            "q75": float(np.percentile(pvals, 75)),
        },
        "ii_norm": {
            "median": float(np.median(ivals)),
            "q25": float(np.percentile(ivals, 25)),
            "q75": float(np.percentile(ivals, 75)),
        },
    }
    header = ["point_index", "pca_curvature", "ii_norm", "layer"]
    rows = [
        (i, float(pvals[i]), float(ivals[i]), cloud.layer_index)
        for i in range(cloud.n)
    ]
    return report, header, rows


def run_gap(cfg, workers=1, seed=0):
    cloud = sio.load_cloud(cfg["cloud"])
    head = sio.load_head(cfg["head"])
    eps_min = float(cfg.get("eps_min", mg.DEFAULT_FIT_RANGE[0]))
    eps_max = float(cfg.get("eps_max", mg.DEFAULT_FIT_RANGE[1]))
    samples = mg.margin_samples(head, cloud)
    margins = np.array([s.margin for s in samples])
    entropies = np.array([s.entropy for s in samples])
    curve = mg.fit_loglog(mg.gap_curve(margins), eps_min, eps_max)
    rho = mg.spearman(margins, entropies)
    profile = mg.percentile_profile(margins)
    report = {
        "schema": SCHEMA_VERSION,
        "n": int(margins.size),
        "slope": curve.fit["slope"],
        "r2": curve.fit["r_squared"],
        "spearman": rho,
        "spearman_abs": abs(rho),
        "median_margin": profile["p50"],
        "frac_below_half": float(np.mean(margins < 0.5)),
        "percentiles": profile,
        "fit_range": [eps_min, eps_max],
        "curve": {"epsilons": curve.epsilons, "etas": curve.etas},
    }
    header = ["point_index", "margin", "entropy", "top", "runner_up"]
    rows = [
        (i, s.margin, s.entropy, s.top_token, s.runner_up_token)
        for i, s in enumerate(samples)
    ]
    return report, header, rows


def run_fisher(cfg, workers=1, seed=0):
    cloud = sio.load_cloud(cfg["cloud"])
    head = sio.load_head(cfg["head"])
    n_points = min(int(cfg.get("n_points", 16)), cloud.n)
    top_k = cfg.get("top_k")
    top_k = int(top_k) if top_k else None
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(cloud.n, size=n_points, replace=False))
    rows = []
    for i in idx:
        G = fisher_matrix(head, cloud.points[i], top_k=top_k)
        evals = np.linalg.eigvalsh(G.G)
        rank = int(np.sum(evals > 1e-8 * max(evals[-1], 0.0)))
        rows.append((int(i), float(evals[-1]), float(np.sum(evals)), rank))
    report = {
        "schema": SCHEMA_VERSION,
        "top_k": top_k,
        "points": [
            {"point_index": r[0], "lambda_max": r[1], "trace": r[2], "rank": r[3]}
            for r in rows
        ],
    }
    return report, ["point_index", "lambda_max", "trace", "rank"], rows


def run_spectral(cfg, workers=1, seed=0):
    cloud = sio.load_cloud(cfg["cloud"])
    k = int(cfg.get("k", 10))
    out_dims = int(cfg.get("out_dims", 2))
    normalized = cfg.get("normalized", "false").lower() in ("1", "true", "yes")
    table = build_neighbor_table(cloud, k, workers=workers)
    A = spec.knn_graph(table)
    coords, evals = spec.spectral_embedding(A, out_dims, normalized=normalized)
    margins = entropies = None
    if cfg.get("head"):
        head = sio.load_head(cfg["head"])
        samples = mg.margin_samples(head, cloud)
        margins = [s.margin for s in samples]
        entropies = [s.entropy for s in samples]
    report = {
        "schema": SCHEMA_VERSION,
        "k": k,
        "out_dims": out_dims,
        "normalized": normalized,
        "eigenvalues": evals,
    }
    header = ["point_index"] + [f"coord_{j+1}" for j in range(out_dims)]
    if margins is not None:
        header += ["margin", "entropy"]
    rows = []
    for i in range(cloud.n):
        row = [i] + [float(c) for c in coords[i]]
        if margins is not None:
            row += [margins[i], entropies[i]]
        rows.append(tuple(row))
    return report, header, rows


def run_validate(cfg, workers=1, seed=0):
    n_samples = int(cfg.get("square_samples", 100_000))
    sizes = [int(s) for s in cfg.get("lloyd_sizes", "16,64,256").split(",")]
    L = float(cfg.get("boundary_length", 1.0))
    lam = float(cfg.get("lam", 2.0))
    square = syn.SyntheticManifold("cube", 2, 2, seed=seed)
    cloud = syn.sample(square, n_samples, seed=seed)
    quant_rows = []
    for M in sizes:
        cb = syn.lloyd_quantize(cloud, M, seed=seed)
        bound = syn.distortion_lower_bound(2, 1.0, M, 1.0)
        quant_rows.append({
            "M": M,
            "distortion": cb.distortion,
            "bound": bound,
            "bound_satisfied": bool(cb.distortion >= bound),
        })
    eps = np.linspace(0.005, 0.3, 60)
    gap = syn.planar_gap_experiment(L, lam, eps, n_samples=n_samples, seed=seed)
    fit = syn.fit_linear_slope(gap["curve"], 0.01, 0.2)
    slope_rows = [{
        "slope_measured": fit["slope"],
        "slope_predicted": gap["predicted_slope"],
        "r_squared": fit["r_squared"],
        "within_tol": bool(
            abs(fit["slope"] - gap["predicted_slope"]) <= 0.1 * gap["predicted_slope"]
        ),
    }]
    report = {
        "schema": SCHEMA_VERSION,
        "quantization": quant_rows,
        "gap_scaling": slope_rows,
    }
    header = ["M", "distortion", "bound", "bound_satisfied"]
    rows = [(r["M"], r["distortion"], r["bound"], r["bound_satisfied"])
            for r in quant_rows]
    return report, header, rows


_COMMANDS = {
    "dim": run_dim,
    "curvature": run_curvature,
    "gap": run_gap,
    "fisher": run_fisher,
    "spectral": run_spectral,
    "validate": run_validate,
}


def build_parser():
    p = argparse.ArgumentParser(prog="semgeom",
                                description="Latent-manifold geometry toolkit")
    p.add_argument("command", choices=list(_COMMANDS) + ["all"])
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("--format", choices=["json", "csv", "both"], default="both")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cp = _load_config(args.config)
        commands = list(_COMMANDS) if args.command == "all" else [args.command]
        manifest = {
            "schema": SCHEMA_VERSION,
            "version": __version__,
            "seed": args.seed,
            "workers": args.workers,
            "commands": commands,
            "config": {s: dict(cp[s]) for s in cp.sections()},
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        }
        args.out.mkdir(parents=True, exist_ok=True)
        with open(args.out / "manifest.json", "w") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")
        for name in commands:
            cfg = _section(cp, name)
            report, header, rows = _COMMANDS[name](
                cfg, workers=args.workers, seed=args.seed
            )
            _write_report(args.out, name, report, header, rows, args.format)
    except (SemgeomError, OSError, KeyError, ValueError) as e:
        print(f"semgeom: error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
