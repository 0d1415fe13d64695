"""Command-line surface: test, fit, predict, crossval, simulate, export-curve."""

from __future__ import annotations

import csv
import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from .copulas import CopulaSpec, Family
from .data import kfold_assignment, load_csv
from .simgen import (
    Scenario,
    StudyConfig,
    method_label,
    run_study,
    run_tree_study,
    worker_count,
)
from .survcurve import cge
from .tree import SurvivalTree, TreeConfig, fit_tree
from .twosample import logrank_test, permutation_test

ERROR_PREFIX = "cgesurv-error:"


def _fail(msg: str):
    click.echo(f"{ERROR_PREFIX} {msg}", err=True)
    sys.exit(2)


def reporting_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, OSError, KeyError) as exc:
            _fail(str(exc))

    return wrapper


def _resolve_copula(family: str, tau: float | None, theta: float | None) -> CopulaSpec:
    fam = Family(family)
    if fam is Family.INDEPENDENCE:
        if tau not in (None, 0.0) or theta not in (None, 0.0):
            raise ValueError("independence copula takes no tau/theta")
        return CopulaSpec.independence()
    if (tau is None) == (theta is None):
        raise ValueError("specify exactly one of --tau or --theta")
    return CopulaSpec.from_tau(fam, tau) if tau is not None else CopulaSpec.from_theta(fam, theta)


def copula_options(fn):
    fn = click.option(
        "--family",
        type=click.Choice([f.value for f in Family]),
        default=Family.CLAYTON.value,
        show_default=True,
    )(fn)
    fn = click.option("--tau", type=float, default=None, help="Kendall's tau")(fn)
    fn = click.option("--theta", type=float, default=None, help="copula parameter")(fn)
    return fn


@click.group()
def main():
    """Copula-graphic survival tests and trees."""


@main.command("test")
@click.argument("file", type=click.Path(exists=True))
@click.option("--group-column", required=True)
@copula_options
@click.option("--n-perm", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--logrank/--no-logrank", default=True, show_default=True)
@click.option("--replicates-out", type=click.Path(), default=None)
@reporting_errors
def cmd_test(file, group_column, family, tau, theta, n_perm, seed, logrank, replicates_out):
    """Two-sample permutation test with the group taken from a binary column."""
    spec = _resolve_copula(family, tau, theta)
    data = load_csv(file)
    if group_column not in data.names:
        raise ValueError(f"group column {group_column!r} not in dataset")
    g = data.covariates[:, data.names.index(group_column)]
    levels = np.unique(g)
    if levels.size != 2:
        raise ValueError(f"group column {group_column!r} is not binary")
    m1 = g == levels[0]
    res = permutation_test(
        data.time[m1],
        data.event[m1],
        data.time[~m1],
        data.event[~m1],
        spec,
        n_perm,
        seed,
        return_replicates=replicates_out is not None,
    )
    click.echo(f"group column: {group_column} (group1 = {levels[0]:g}, group2 = {levels[1]:g})")
    click.echo(f"copula: {spec.family.value} theta={spec.theta:.10g} tau={spec.tau:.10g}")
    click.echo(f"L1 = {res.observed_l1:.10g}")
    click.echo(f"signed L1 = {res.signed_l1:.10g}")
    click.echo(f"p-value = {res.p_value:.10g}  (n_perm = {res.n_perm}, seed = {seed})")
    cens1 = 1.0 - data.event[m1].mean()
    cens2 = 1.0 - data.event[~m1].mean()
    click.echo(f"censoring fraction: group1 = {cens1:.6g}, group2 = {cens2:.6g}")
    if res.degenerate:
        click.echo("warning: degenerate pooled data (no events or a single time)")
    if logrank:
        lr = logrank_test(data.time[m1], data.event[m1], data.time[~m1], data.event[~m1])
        click.echo(f"logrank: chi-square = {lr.chi_square:.10g}, p-value = {lr.p_value:.10g}")
    if replicates_out is not None:
        np.savetxt(replicates_out, res.replicates, header="l1", comments="", fmt="%.17g")


def _tree_config(spec, p_threshold, n_perm, seed, min_node_size, method="cge") -> TreeConfig:
    return TreeConfig(
        copula=spec,
        p_threshold=p_threshold,
        n_perm=n_perm,
        seed=seed,
        min_node_size=min_node_size,
        method=method,
    )


@main.command("fit")
@click.argument("file", type=click.Path(exists=True))
@copula_options
@click.option("--p-threshold", type=float, default=0.01, show_default=True)
@click.option("--n-perm", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--min-node-size", type=int, default=3, show_default=True)
@click.option("--round-decimals", type=int, default=None)
@click.option("--method", type=click.Choice(["cge", "logrank"]), default="cge", show_default=True)
@click.option("--out-dir", type=click.Path(), default=".", show_default=True)
@reporting_errors
def cmd_fit(
    file, family, tau, theta, p_threshold, n_perm, seed, min_node_size,
    round_decimals, method, out_dir,
):
    """Fit a survival tree; writes tree.json, tree.txt, tree.dot and node curves."""
    spec = (
        CopulaSpec.independence()
        if method == "logrank"
        else _resolve_copula(family, tau, theta)
    )
    data = load_csv(file)
    if round_decimals is not None:
        data = data.round_covariates(round_decimals)
    tree = fit_tree(data, _tree_config(spec, p_threshold, n_perm, seed, min_node_size, method))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "tree.json").write_text(tree.to_json())
    (out / "tree.txt").write_text(tree.to_text())
    (out / "tree.dot").write_text(tree.to_dot())
    for node in tree.terminal_nodes():
        node.curve.to_csv(out / f"terminal_{node.terminal_number}.csv")
    click.echo(f"fitted tree with {tree.n_terminal} terminal node(s) -> {out}")


@main.command("predict")
@click.argument("tree_file", type=click.Path(exists=True))
@click.argument("file", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="CSV output (default stdout)")
@reporting_errors
def cmd_predict(tree_file, file, out):
    """Predict terminal-node numbers for every row of a dataset."""
    tree = SurvivalTree.from_json(Path(tree_file).read_text())
    data = load_csv(file)
    if data.names != tree.covariate_names:
        raise ValueError(
            "dataset covariates do not match the tree "
            f"(expected {tree.covariate_names}, got {data.names})"
        )
    numbers = tree.predict_nodes(data.covariates)
    lines = ["terminal_number"] + [str(int(k)) for k in numbers]
    text = "\n".join(lines) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


@main.command("crossval")
@click.argument("file", type=click.Path(exists=True))
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--tau", "taus", type=float, multiple=True, help="CGE tau grid (repeatable)")
@click.option("--logrank/--no-logrank", default=True, show_default=True)
@click.option("--p-threshold", type=float, default=0.01, show_default=True)
@click.option("--n-perm", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--min-node-size", type=int, default=3, show_default=True)
@click.option("--round-decimals", type=int, default=None)
@click.option("--out", type=click.Path(), default="crossval_summary.csv", show_default=True)
@reporting_errors
def cmd_crossval(
    file, folds, taus, logrank, p_threshold, n_perm, seed, min_node_size,
    round_decimals, out,
):
    """k-fold cross-validation of tree methods: terminal count, IBS(KM), Harrell's C."""
    from .metrics import harrell_c, integrated_brier
    from .survcurve import censoring_km

    data = load_csv(file)
    if round_decimals is not None:
        data = data.round_covariates(round_decimals)
    methods: list[tuple[str, float | None]] = [("cge", t) for t in taus]
    if logrank:
        methods.append(("logrank", None))
    if not methods:
        raise ValueError("no methods requested: pass --tau values and/or --logrank")
    fold_ids = kfold_assignment(len(data), folds, seed)
    fold_path = Path(out).with_suffix(".folds.csv")
    np.savetxt(fold_path, fold_ids, header="fold", comments="", fmt="%d")

    rows = []
    for kind, t in methods:
        if kind == "cge":
            spec = CopulaSpec.independence() if t == 0.0 else CopulaSpec.from_tau("clayton", t)
        else:
            spec = CopulaSpec.independence()
        label = method_label((kind, t))
        per_fold = []
        for f in range(folds):
            test = data.subset(fold_ids == f)
            train = data.subset(fold_ids != f)
            if not train.event.any() or not test.event.any():
                click.echo(f"warning: fold {f} has no events, skipped", err=True)
                continue
            tree = fit_tree(
                train, _tree_config(spec, p_threshold, n_perm, seed, min_node_size, kind)
            )
            by_number = {n.terminal_number: n for n in tree.terminal_nodes()}
            tn = tree.predict_nodes(test.covariates)
            curves = [by_number[k].curve for k in tn]
            grid = np.union1d(train.time, test.time)
            ibs = integrated_brier(
                test.time, test.event, curves, censoring_km(train.time, train.event), grid
            )
            per_fold.append((tree.n_terminal, ibs, harrell_c(tn, test.time, test.event)))
        if not per_fold:
            continue
        arr = np.array(per_fold, dtype=float)
        means = np.nanmean(arr, axis=0)
        rows.append((label, means[0], means[1], means[2]))

    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "mean_terminal_nodes", "mean_ibs_km", "mean_harrell_c"])
        for label, n_term, ibs, hc in rows:
            writer.writerow([label, f"{n_term:.6g}", f"{ibs:.6g}", f"{hc:.6g}"])
    click.echo(f"wrote {out} ({len(rows)} method(s), folds -> {fold_path})")


_SCENARIO_KEYS = {
    "covariate_kind", "censoring_r", "family", "tau", "theta", "effect",
    "n1", "n2", "n", "p", "q", "rho",
}
_STUDY_KEYS = {
    "study", "n_sim", "n_perm", "alpha", "methods", "master_seed",
    "p_threshold", "min_node_size",
}


def _parse_study_config(raw: dict) -> tuple[StudyConfig, str, float, int]:
    for key in raw:
        if key not in _SCENARIO_KEYS | _STUDY_KEYS:
            raise ValueError(f"unknown config key {key!r}")
    fam = raw.get("family", "independence")
    dep = _resolve_copula(fam, raw.get("tau"), raw.get("theta"))
    scenario = Scenario(
        covariate_kind=raw["covariate_kind"],
        censoring_r=raw["censoring_r"],
        dependence=dep,
        effect=raw.get("effect", 0.0),
        n1=raw.get("n1", 0),
        n2=raw.get("n2", 0),
        n=raw.get("n", 0),
        p=raw.get("p", 50),
        q=raw.get("q", 10),
        rho=raw.get("rho", 0.5),
    )
    methods = []
    for entry in raw["methods"]:
        if entry == "logrank":
            methods.append(("logrank", None))
        elif isinstance(entry, str) and entry.startswith("cge:"):
            methods.append(("cge", float(entry.split(":", 1)[1])))
        else:
            raise ValueError(f"bad method entry {entry!r} (use 'logrank' or 'cge:<tau>')")
    config = StudyConfig(
        scenario=scenario,
        n_sim=raw["n_sim"],
        n_perm=raw["n_perm"],
        methods=methods,
        master_seed=raw["master_seed"],
        alpha=raw.get("alpha", 0.05),
    )
    return (
        config,
        raw.get("study", "test"),
        raw.get("p_threshold", 0.01),
        raw.get("min_node_size", 3),
    )


@main.command("simulate")
@click.argument("config_file", type=click.Path(exists=True))
@click.option("--out-dir", type=click.Path(), default=".", show_default=True)
@click.option("--dry-run", is_flag=True, help="print the resolved scenario and exit")
@reporting_errors
def cmd_simulate(config_file, out_dir, dry_run):
    """Run a Monte Carlo study from a JSON config; writes results and summary CSVs."""
    raw = json.loads(Path(config_file).read_text())
    config, study, p_threshold, min_node_size = _parse_study_config(raw)
    if dry_run:
        click.echo(f"study: {study}")
        click.echo(f"scenario: {config.scenario}")
        click.echo(f"methods: {[method_label(m) for m in config.methods]}")
        click.echo(
            f"n_sim: {config.n_sim}  n_perm: {config.n_perm}  alpha: {config.alpha}  "
            f"master_seed: {config.master_seed}  workers: {worker_count()}"
        )
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    labels = [method_label(m) for m in config.methods]
    if study == "test":
        summary = run_study(config)
        with open(out / "results.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["replicate", *labels])
            for i, row in enumerate(summary.p_values):
                writer.writerow([i, *(f"{p:.10g}" for p in row)])
        with open(out / "summary.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["method", "power", "se", "mean_cens_group1", "mean_cens_group2"])
            for lab in labels:
                writer.writerow(
                    [
                        lab,
                        f"{summary.power[lab]:.6g}",
                        f"{summary.se[lab]:.6g}",
                        f"{summary.mean_censoring_group1:.6g}",
                        f"{summary.mean_censoring_group2:.6g}",
                    ]
                )
    elif study == "tree":
        summary = run_tree_study(config, p_threshold=p_threshold, min_node_size=min_node_size)
        with open(out / "results.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["replicate", "method", "n_terminal", "precision", "harrell_c", "ibs_km", "ibs_cge"]
            )
            for lab in labels:
                for i, rep in enumerate(summary.reports[lab]):
                    writer.writerow(
                        [
                            i, lab, rep.n_terminal, f"{rep.precision:.6g}",
                            f"{rep.harrell_c:.6g}", f"{rep.ibs_km:.6g}", f"{rep.ibs_cge:.6g}",
                        ]
                    )
        with open(out / "summary.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["method", "mean_terminal_nodes", "mean_precision", "mean_harrell_c",
                 "mean_ibs_km", "mean_ibs_cge"]
            )
            for lab in labels:
                writer.writerow(
                    [
                        lab,
                        f"{summary.mean_terminal_nodes[lab]:.6g}",
                        f"{summary.mean_precision[lab]:.6g}",
                        f"{summary.mean_harrell_c[lab]:.6g}",
                        f"{summary.mean_ibs_km[lab]:.6g}",
                        f"{summary.mean_ibs_cge[lab]:.6g}",
                    ]
                )
    else:
        raise ValueError(f"unknown study kind {study!r} (use 'test' or 'tree')")
    click.echo(f"wrote {out / 'results.csv'} and {out / 'summary.csv'}")


@main.command("export-curve")
@click.argument("file", type=click.Path(exists=True))
@copula_options
@click.option("--out", type=click.Path(), required=True)
@reporting_errors
def cmd_export_curve(file, family, tau, theta, out):
    """Write the dataset's copula-graphic survival curve as time,value CSV."""
    spec = _resolve_copula(family, tau, theta)
    data = load_csv(file)
    cge(data.time, data.event, spec).to_csv(out)
    click.echo(f"wrote {out}")


if __name__ == "__main__":
    main()
