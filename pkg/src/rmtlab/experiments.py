"""Config-driven experiment runner.

Each experiment kind samples, analyzes, and writes a `report.json` plus
kind-specific CSV files into an output directory.  Outputs are a pure
function of (config, seed): replicates may run on several threads but are
aggregated in fixed order, and every random draw is counter-based.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .ensemble import (EnsembleError, EnsembleSpec, EntryLaw, make_partition,
                       sample_matrix, scale_matrix, singleton_partition)
from .graphenergy import (energy_bounds_unbalanced, energy_decomposition_check,
                          graph_energy, predicted_energy_gnp,
                          predicted_energy_multipartite, sample_graph)
from .laws import (MomentSequence, catalan, find_negativity_witness,
                   gamma_bipartite_printed, gamma_main,
                   gamma_proposition_printed, gamma_uniform, hankel_report,
                   mixing_radius, pseudo_char, semicircle_cdf,
                   semicircle_moment, semicircle_stieltjes)
from .spectral import (eigenvalues_sym, empirical_moment, esd, ks_distance,
                       spectrum_to_csv, stieltjes_empirical)
from .walks import (enumerate_shapes, good_shape_count, limit_gamma_walks,
                    shapes_to_csv)

KINDS = ("esd", "moments", "stieltjes", "walks", "hankel", "charfn",
         "energy", "decomposition")


class ConfigError(ValueError):
    """Invalid experiment configuration; `field` is the offending path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class NumericError(RuntimeError):
    """An experiment failed numerically after config validation."""


def _get(cfg: dict, field: str, typ, default=None, required: bool = False):
    cur = cfg
    parts = field.split(".")
    for p in parts[:-1]:
        cur = cur.get(p, {}) if isinstance(cur, dict) else {}
    if not isinstance(cur, dict) or parts[-1] not in cur or cur[parts[-1]] is None:
        if required:
            raise ConfigError(field, "missing required field")
        return default
    val = cur[parts[-1]]
    if typ is float and isinstance(val, int):
        val = float(val)
    if not isinstance(val, typ):
        raise ConfigError(field, f"expected {typ}, got {type(val).__name__}")
    return val


def _ensemble_spec(cfg: dict, seed_override=None) -> EnsembleSpec:
    n = _get(cfg, "ensemble.n", int, required=True)
    fractions = _get(cfg, "ensemble.fractions", list, required=True)
    law_intra = _get(cfg, "ensemble.law_intra", dict, required=True)
    law_cross = _get(cfg, "ensemble.law_cross", dict, required=True)
    seed = seed_override if seed_override is not None \
        else _get(cfg, "ensemble.seed", int, default=0)
    try:
        return EnsembleSpec(partition=make_partition(n, fractions),
                            law_intra=EntryLaw.from_dict(law_intra),
                            law_cross=EntryLaw.from_dict(law_cross),
                            seed=seed)
    except EnsembleError as exc:
        raise ConfigError("ensemble", str(exc)) from exc


def reference_radius(spec: EnsembleSpec, override=None) -> float:
    """Semicircle radius the ESD of this ensemble is expected to approach.

    One part: plain Wigner with radius sigma_intra.  Parts of vanishing
    size (largest fraction <= 5%): radius sigma_cross.  Otherwise the mixed
    radius sqrt((s1 + (m-1) s2)/m) for m comparable parts.
    """
    if override is not None:
        return float(override)
    s1 = float(spec.law_intra.variance)
    s2 = float(spec.law_cross.variance)
    m = spec.partition.m
    if m == 1:
        return math.sqrt(s1)
    if max(spec.partition.fractions) <= 0.05:
        return math.sqrt(s2)
    return mixing_radius(m, s1, s2)


def histogram(eigs: np.ndarray, bins: int, range_=None):
    """Equal-width binned counts and densities over the spectrum.

    Density is count/(n*width), so the densities integrate to 1 whenever
    the range covers every eigenvalue.
    """
    eigs = np.asarray(eigs, dtype=float)
    if eigs.size == 0:
        raise ValueError("empty spectrum")
    if bins < 2:
        raise ValueError("need at least 2 bins")
    lo, hi = (float(eigs.min()), float(eigs.max())) if range_ is None \
        else (float(range_[0]), float(range_[1]))
    if hi <= lo:
        hi = lo + 1.0
    counts, edges = np.histogram(eigs, bins=bins, range=(lo, hi))
    width = edges[1] - edges[0]
    density = counts / (eigs.size * width)
    return edges, counts, density


def _write_histogram_csv(path, edges, counts, density):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_lo", "bin_hi", "count", "density"])
        for i in range(len(counts)):
            w.writerow([repr(float(edges[i])), repr(float(edges[i + 1])),
                        int(counts[i]), repr(float(density[i]))])


def _thread_count() -> int:
    raw = os.environ.get("RMTLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_replicates(fn, replicates: int):
    threads = _thread_count()
    if threads == 1 or replicates == 1:
        return [fn(i) for i in range(replicates)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(replicates)))


# ---------------------------------------------------------------------------
# per-kind runners; each returns (report_fragment, files_written)
# ---------------------------------------------------------------------------

def _spectra(spec: EnsembleSpec, replicates: int):
    def one(i):
        return eigenvalues_sym(scale_matrix(sample_matrix(spec, i)))
    return _map_replicates(one, replicates)


def _run_esd(cfg, out: Path, seed, replicates):
    spec = _ensemble_spec(cfg, seed)
    bins = _get(cfg, "bins", int, default=40)
    if bins < 2:
        raise ConfigError("bins", "need at least 2 bins")
    radius = reference_radius(spec, _get(cfg, "reference_radius", float))
    spectra = _spectra(spec, replicates)
    files = []
    per_rep = []
    for i, eigs in enumerate(spectra):
        path = out / f"eigenvalues_r{i}.csv"
        spectrum_to_csv(eigs, path)
        files.append(path)
        per_rep.append({
            "replicate": i,
            "ks_vs_semicircle": ks_distance(esd(eigs),
                                            lambda x: semicircle_cdf(x, radius)),
            "moment2": empirical_moment(eigs, 2),
            "moment4": empirical_moment(eigs, 4),
        })
    all_eigs = np.concatenate(spectra)
    edges, counts, density = histogram(all_eigs, bins,
                                       (-1.05 * radius, 1.05 * radius))
    hpath = out / "histogram.csv"
    _write_histogram_csv(hpath, edges, counts, density)
    files.append(hpath)
    report = {
        "ensemble": spec.to_dict(),
        "reference_radius": radius,
        "replicates": per_rep,
        "aggregate": {
            "mean_ks": float(np.mean([r["ks_vs_semicircle"] for r in per_rep])),
            "mean_moment2": float(np.mean([r["moment2"] for r in per_rep])),
            "mean_moment4": float(np.mean([r["moment4"] for r in per_rep])),
        },
    }
    return report, files


def _run_moments(cfg, out: Path, seed, replicates):
    spec = _ensemble_spec(cfg, seed)
    max_k = _get(cfg, "max_k", int, default=8)
    if not 1 <= max_k <= 64:
        raise ConfigError("max_k", "must be in 1..64")
    radius = reference_radius(spec, _get(cfg, "reference_radius", float))
    spectra = _spectra(spec, replicates)
    rows = []
    for k in range(max_k + 1):
        emp = float(np.mean([empirical_moment(e, k) for e in spectra]))
        theo = float(semicircle_moment(k, radius))
        rows.append({"k": k, "empirical": emp, "theoretical": theo,
                     "abs_err": abs(emp - theo)})
    mpath = out / "moment_table.csv"
    with open(mpath, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "empirical", "theoretical", "abs_err"])
        for r in rows:
            w.writerow([r["k"], repr(r["empirical"]), repr(r["theoretical"]),
                        repr(r["abs_err"])])
    seq = MomentSequence(values=tuple(float(semicircle_moment(k, radius))
                                      for k in range(max_k + 1)),
                         provenance="main_theorem")
    spath = out / "theoretical_moments.csv"
    seq.to_csv(spath)
    report = {"ensemble": spec.to_dict(), "reference_radius": radius,
              "moments": rows}
    return report, [mpath, spath]


def _run_stieltjes(cfg, out: Path, seed, replicates):
    spec = _ensemble_spec(cfg, seed)
    z_grid = _get(cfg, "z_grid", list,
                  default=[[0.0, 1.0], [0.5, 1.0], [-0.5, 0.5], [1.0, 2.0]])
    radius = reference_radius(spec, _get(cfg, "reference_radius", float))
    for j, pair in enumerate(z_grid):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(v, (int, float)) for v in pair)):
            raise ConfigError(f"z_grid[{j}]", "expected [re, im]")
        if pair[1] <= 0:
            raise ConfigError(f"z_grid[{j}]", "Im z must be positive")
    spectra = _spectra(spec, replicates)
    rows = []
    for re, im in z_grid:
        z = complex(re, im)
        emp = np.mean([stieltjes_empirical(e, z) for e in spectra])
        theo = semicircle_stieltjes(z, radius)
        rows.append({"re_z": re, "im_z": im,
                     "emp_re": emp.real, "emp_im": emp.imag,
                     "theory_re": theo.real, "theory_im": theo.imag,
                     "abs_err": abs(emp - theo)})
    path = out / "stieltjes.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re_z", "im_z", "emp_re", "emp_im",
                    "theory_re", "theory_im", "abs_err"])
        for r in rows:
            w.writerow([repr(float(r[c])) for c in
                        ("re_z", "im_z", "emp_re", "emp_im",
                         "theory_re", "theory_im", "abs_err")])
    return {"ensemble": spec.to_dict(), "reference_radius": radius,
            "grid": rows}, [path]


def _run_walks(cfg, out: Path, seed, replicates):
    max_k = _get(cfg, "max_k", int, default=8)
    if not 2 <= max_k <= 10 or max_k % 2 != 0:
        raise ConfigError("max_k", "must be an even integer in 2..10")
    rows = []
    shape_rows = []
    for k in range(2, max_k + 1, 2):
        v = k // 2 + 1
        shapes = enumerate_shapes(k, v)
        g = good_shape_count(k, v, zero_mean=True)
        t = catalan(k // 2)
        rows.append({"k": k, "v": v, "shapes": len(shapes), "good": g,
                     "catalan": t, "identity_holds": g == t})
        shape_rows.extend((k, v, s) for s in shapes)
    wpath = out / "walks.csv"
    with open(wpath, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "v", "shapes", "good", "catalan", "identity_holds"])
        for r in rows:
            w.writerow([r["k"], r["v"], r["shapes"], r["good"], r["catalan"],
                        r["identity_holds"]])
    spath = out / "shapes.csv"
    shapes_to_csv(shape_rows, spath)
    return {"table": rows,
            "all_identities_hold": all(r["identity_holds"] for r in rows)}, \
        [wpath, spath]


def _hankel_gammas(cfg, k: int):
    source = _get(cfg, "hankel.source", str, default="main")
    L = 2 * k
    if source == "main":
        m = _get(cfg, "hankel.m", int, default=2)
        s1 = _get(cfg, "hankel.sigma1sq", float, default=1.0)
        s2 = _get(cfg, "hankel.sigma2sq", float, default=1.0)
        return [float(gamma_main(j, m, s1, s2)) for j in range(L + 1)], source
    if source == "uniform":
        s2 = _get(cfg, "hankel.sigma2sq", float, default=1.0)
        return [float(gamma_uniform(j, s2)) for j in range(L + 1)], source
    if source == "bipartite_printed":
        nu1 = _get(cfg, "hankel.nu1", float, required=True)
        s2 = _get(cfg, "hankel.sigma2sq", float, default=1.0)
        vals = [gamma_bipartite_printed(j, nu1, 1 - nu1, s2)
                for j in range(L + 1)]
        vals[0] = 1.0  # printed formula is only stated for k >= 1
        return vals, source
    if source == "proposition_printed":
        m = _get(cfg, "hankel.m", int, required=True)
        nu1 = _get(cfg, "hankel.nu1", float, required=True)
        nu2 = _get(cfg, "hankel.nu2", float, required=True)
        if L > 6:
            raise ConfigError("hankel.k", "printed values stop at gamma_6")
        vals = [0.0] * (L + 1)
        vals[0] = 1.0
        for j in (1, 2, 3):
            if 2 * j <= L:
                vals[2 * j] = float(gamma_proposition_printed(j, m, nu1, nu2))
        return vals, source
    if source == "walk_oracle":
        fractions = _get(cfg, "hankel.fractions", list, required=True)
        s1 = _get(cfg, "hankel.sigma1sq", float, default=0.0)
        s2 = _get(cfg, "hankel.sigma2sq", float, default=1.0)
        vals = [1.0] + [0.0] * L
        for j in range(2, L + 1, 2):
            vals[j] = float(limit_gamma_walks(fractions, s1, s2, j,
                                              zero_intra=(s1 == 0.0)))
        return vals, source
    raise ConfigError("hankel.source", f"unknown source {source!r}")


def _run_hankel(cfg, out: Path, seed, replicates):
    k = _get(cfg, "hankel.k", int, default=3)
    if not 1 <= k <= 5:
        raise ConfigError("hankel.k", "must be in 1..5")
    gammas, source = _hankel_gammas(cfg, k)
    rep = hankel_report(gammas, k)
    path = out / "hankel.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["minor", "determinant"])
        for r, d in enumerate(rep["determinants"]):
            w.writerow([r, repr(d)])
    return {"source": source, "k": k, "gammas": gammas,
            "determinants": rep["determinants"],
            "min_eigenvalue": rep["min_eigenvalue"], "psd": rep["psd"]}, [path]


def _run_charfn(cfg, out: Path, seed, replicates):
    nuhat = _get(cfg, "charfn.nuhat", float, required=True)
    sigma2 = _get(cfg, "charfn.sigma2", float, default=1.0)
    t_max = _get(cfg, "charfn.t_max", float, default=60.0)
    step = _get(cfg, "charfn.step", float, default=0.05)
    if step <= 0:
        raise ConfigError("charfn.step", "must be positive")
    try:
        witness = find_negativity_witness(nuhat, sigma2, t_max, step)
    except Exception as exc:
        raise ConfigError("charfn", str(exc)) from exc
    path = out / "charfn.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "pseudo_char"])
        t = step
        while t <= t_max:
            val = pseudo_char(t, nuhat, sigma2)
            w.writerow([repr(t), repr(val)])
            if val < -1e6:  # stop once the divergence is unambiguous
                break
            t += step
    return {"nuhat": nuhat, "sigma2": sigma2, "t_max": t_max,
            "witness": witness}, [path]


def _graph_setup(cfg, seed):
    n = _get(cfg, "graph.n", int, required=True)
    p = _get(cfg, "graph.p", float, required=True)
    if not 0.0 <= p <= 1.0:
        raise ConfigError("graph.p", "must lie in [0, 1]")
    fractions = _get(cfg, "graph.fractions", list)
    gseed = seed if seed is not None else _get(cfg, "graph.seed", int, default=0)
    try:
        partition = singleton_partition(n) if fractions is None \
            else make_partition(n, fractions)
    except EnsembleError as exc:
        raise ConfigError("graph.fractions", str(exc)) from exc
    return partition, p, gseed, fractions


def _run_energy(cfg, out: Path, seed, replicates):
    partition, p, gseed, fractions = _graph_setup(cfg, seed)
    n = partition.n
    if not 0.0 < p < 1.0:
        raise ConfigError("graph.p", "energy prediction requires 0 < p < 1")
    if fractions is None:
        prediction = predicted_energy_gnp(n, p)
        m_report = n
    else:
        m_report = len(fractions)
        prediction = predicted_energy_multipartite(n, m_report, p)

    def one(i):
        return graph_energy(sample_graph(partition, p, gseed, i))

    energies = _map_replicates(one, replicates)
    rows = []
    for i, e in enumerate(energies):
        rows.append({"n": n, "p": p, "m": m_report, "replicate": i,
                     "energy": e, "normalized": e / n**1.5,
                     "prediction": prediction,
                     "rel_dev": (e - prediction) / prediction})
    path = out / "energy.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "p", "m", "replicate", "energy", "normalized",
                    "prediction", "rel_dev"])
        for r in rows:
            w.writerow([r["n"], repr(r["p"]), r["m"], r["replicate"],
                        repr(r["energy"]), repr(r["normalized"]),
                        repr(r["prediction"]), repr(r["rel_dev"])])
    return {"rows": rows,
            "aggregate": {
                "mean_energy": float(np.mean(energies)),
                "mean_normalized": float(np.mean(energies)) / n**1.5,
                "prediction": prediction,
            }}, [path]


def _run_decomposition(cfg, out: Path, seed, replicates):
    partition, p, gseed, fractions = _graph_setup(cfg, seed)
    if fractions is None:
        raise ConfigError("graph.fractions", "decomposition needs explicit parts")
    large = _get(cfg, "graph.large_parts", list, required=True)
    if not all(isinstance(i, int) for i in large):
        raise ConfigError("graph.large_parts", "expected integer indices")

    def one(i):
        return energy_decomposition_check(partition, large, p, gseed, i)

    checks = _map_replicates(one, replicates)
    bounds = None
    if 0.0 < p < 1.0:
        bounds = energy_bounds_unbalanced(partition.n, partition.fractions,
                                          large, p)
    report = {"large_parts": list(large), "bounds": bounds,
              "replicates": [
                  {"replicate": i, "energy_A": c["energy_A"],
                   "energy_X": c["energy_X"], "energy_D": c["energy_D"],
                   "block_diagonal": c["block_diagonal"], "holds": c["holds"]}
                  for i, c in enumerate(checks)],
              "all_hold": all(c["holds"] for c in checks)}
    return report, []


_RUNNERS = {
    "esd": _run_esd,
    "moments": _run_moments,
    "stieltjes": _run_stieltjes,
    "walks": _run_walks,
    "hankel": _run_hankel,
    "charfn": _run_charfn,
    "energy": _run_energy,
    "decomposition": _run_decomposition,
}


def run_experiment(config: dict, out_dir, seed=None, replicates=None) -> dict:
    """Execute the configured study, writing report.json and CSVs.

    Raises ConfigError for bad configs and NumericError for runtime
    numerical failures; partial outputs are removed on failure.
    """
    if not isinstance(config, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    kind = _get(config, "kind", str, required=True)
    if kind not in KINDS:
        raise ConfigError("kind", f"unknown kind {kind!r}; valid: {KINDS}")
    replicates = replicates if replicates is not None \
        else _get(config, "replicates", int, default=1)
    if replicates < 1:
        raise ConfigError("replicates", "must be at least 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    t0 = time.monotonic()
    try:
        fragment, files = _RUNNERS[kind](config, out, seed, replicates)
        written.extend(files)
        report = {
            "kind": kind,
            "config": config,
            "seed": seed,
            "replicate_count": replicates,
            "version": __version__,
            "wall_clock_s": time.monotonic() - t0,
            **fragment,
        }
        rpath = out / "report.json"
        with open(rpath, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
        written.append(rpath)
        return report
    except ConfigError:
        for f in written:
            f.unlink(missing_ok=True)
        raise
    except Exception as exc:
        for f in written:
            f.unlink(missing_ok=True)
        raise NumericError(f"{kind} experiment failed: {exc}") from exc
