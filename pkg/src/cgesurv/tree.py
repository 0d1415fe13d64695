"""Survival trees split by permutation-test p-values under dependent censoring.

Each node runs the two-sample test over every covariate/cutoff candidate and
splits where the p-value is minimal, provided it beats the threshold. The
signed statistic orders children so the longer-surviving group goes left;
terminal nodes are numbered 1..K left to right (1 = longest survival) and carry
their copula-graphic survival curve. A logrank splitter is available for
comparison trees.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .copulas import CopulaSpec, Family
from .data import Dataset
from .stepfun import StepFunction
from .survcurve import cge
from .twosample import l1_statistic, logrank_test, permutation_replicates


class TreeConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TreeConfig:
    copula: CopulaSpec
    p_threshold: float
    n_perm: int
    seed: int
    min_node_size: int = 3
    max_censoring_fraction_child: float | None = None
    method: str = "cge"  # "cge" or "logrank"

    def __post_init__(self):
        if not 0.0 < self.p_threshold < 1.0:
            raise TreeConfigError("p_threshold must lie in (0, 1)")
        if self.min_node_size < 3:
            raise TreeConfigError("min_node_size must be >= 3")
        if self.method not in ("cge", "logrank"):
            raise TreeConfigError(f"unknown method {self.method!r}")
        if self.method == "cge":
            if self.n_perm < 1:
                raise TreeConfigError("n_perm must be >= 1")
            if 1.0 / (self.n_perm + 1) >= self.p_threshold:
                raise TreeConfigError(
                    f"1/(n_perm+1) = {1.0 / (self.n_perm + 1):g} is not below "
                    f"p_threshold = {self.p_threshold:g}; no split could ever pass"
                )


@dataclass(frozen=True)
class SplitCandidate:
    covariate_index: int
    cutoff: float
    p_value: float
    signed_l1: float  # sign convention: > 0 means {z <= cutoff} survives longer
    left_count: int
    right_count: int
    low_goes_left: bool


@dataclass
class TreeNode:
    id: int
    member_indices: np.ndarray
    split: SplitCandidate | None = None
    children: tuple[int, int] | None = None
    terminal_number: int | None = None
    curve: StepFunction | None = None


@dataclass
class SurvivalTree:
    config: TreeConfig
    covariate_names: list[str]
    nodes: dict[int, TreeNode] = field(default_factory=dict)
    root_id: int = 0

    @property
    def n_terminal(self) -> int:
        return sum(1 for n in self.nodes.values() if n.children is None)

    def internal_nodes(self) -> list[TreeNode]:
        return [n for n in self.nodes.values() if n.children is not None]

    def terminal_nodes(self) -> list[TreeNode]:
        out = [n for n in self.nodes.values() if n.children is None]
        out.sort(key=lambda n: n.terminal_number)
        return out

    def _route(self, row: np.ndarray) -> TreeNode:
        node = self.nodes[self.root_id]
        while node.children is not None:
            sp = node.split
            val = row[sp.covariate_index]
            if np.isnan(val):
                raise ValueError("missing covariate value; routing is unsupported")
            goes_low = val <= sp.cutoff
            left, right = node.children
            node = self.nodes[left if goes_low == sp.low_goes_left else right]
        return node

    def predict_node(self, row) -> int:
        row = np.asarray(row, dtype=float)
        if row.shape != (len(self.covariate_names),):
            raise ValueError(f"covariate row must have {len(self.covariate_names)} entries")
        return self._route(row).terminal_number

    def predict_survival(self, row, t) -> float:
        row = np.asarray(row, dtype=float)
        if row.shape != (len(self.covariate_names),):
            raise ValueError(f"covariate row must have {len(self.covariate_names)} entries")
        if np.any(np.asarray(t) < 0):
            raise ValueError("t must be >= 0")
        return self._route(row).curve(t)

    def predict_nodes(self, covariates) -> np.ndarray:
        cov = np.asarray(covariates, dtype=float)
        return np.array([self.predict_node(row) for row in cov])

    # -- serialization ---------------------------------------------------

    def to_json(self) -> str:
        cfg = {
            "family": self.config.copula.family.value,
            "theta": self.config.copula.theta,
            "tau": self.config.copula.tau,
            "p_threshold": self.config.p_threshold,
            "n_perm": self.config.n_perm,
            "seed": self.config.seed,
            "min_node_size": self.config.min_node_size,
            "max_censoring_fraction_child": self.config.max_censoring_fraction_child,
            "method": self.config.method,
        }
        nodes = []
        for node in sorted(self.nodes.values(), key=lambda n: n.id):
            entry = {
                "id": node.id,
                "members": [int(i) for i in node.member_indices],
                "terminal_number": node.terminal_number,
                "children": list(node.children) if node.children else None,
                "split": None,
                "curve": None,
            }
            if node.split is not None:
                sp = node.split
                entry["split"] = {
                    "covariate_index": sp.covariate_index,
                    "covariate_name": self.covariate_names[sp.covariate_index],
                    "cutoff": sp.cutoff,
                    "p_value": sp.p_value,
                    "signed_l1": sp.signed_l1,
                    "left_count": sp.left_count,
                    "right_count": sp.right_count,
                    "low_goes_left": sp.low_goes_left,
                }
            if node.curve is not None:
                entry["curve"] = {
                    "jump_times": node.curve.jump_times.tolist(),
                    "values": node.curve.values.tolist(),
                    "initial_value": node.curve.initial_value,
                }
            nodes.append(entry)
        doc = {"covariate_names": self.covariate_names, "config": cfg, "nodes": nodes}
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SurvivalTree":
        doc = json.loads(text)
        cfg = doc["config"]
        spec = (
            CopulaSpec.independence()
            if cfg["family"] == Family.INDEPENDENCE.value
            else CopulaSpec(Family(cfg["family"]), cfg["theta"], cfg["tau"])
        )
        config = TreeConfig(
            copula=spec,
            p_threshold=cfg["p_threshold"],
            n_perm=cfg["n_perm"],
            seed=cfg["seed"],
            min_node_size=cfg["min_node_size"],
            max_censoring_fraction_child=cfg["max_censoring_fraction_child"],
            method=cfg["method"],
        )
        tree = cls(config=config, covariate_names=list(doc["covariate_names"]))
        for entry in doc["nodes"]:
            split = None
            if entry["split"] is not None:
                sp = entry["split"]
                split = SplitCandidate(
                    covariate_index=sp["covariate_index"],
                    cutoff=sp["cutoff"],
                    p_value=sp["p_value"],
                    signed_l1=sp["signed_l1"],
                    left_count=sp["left_count"],
                    right_count=sp["right_count"],
                    low_goes_left=sp["low_goes_left"],
                )
            curve = None
            if entry["curve"] is not None:
                cv = entry["curve"]
                curve = StepFunction(
                    np.asarray(cv["jump_times"]), np.asarray(cv["values"]), cv["initial_value"]
                )
            tree.nodes[entry["id"]] = TreeNode(
                id=entry["id"],
                member_indices=np.asarray(entry["members"], dtype=int),
                split=split,
                children=tuple(entry["children"]) if entry["children"] else None,
                terminal_number=entry["terminal_number"],
                curve=curve,
            )
        return tree

    def to_text(self) -> str:
        lines = [
            f"method: {self.config.method}",
            f"copula: {self.config.copula.family.value} "
            f"theta={self.config.copula.theta:.10g} tau={self.config.copula.tau:.10g}",
            f"p_threshold: {self.config.p_threshold:g}  n_perm: {self.config.n_perm}  "
            f"seed: {self.config.seed}  min_node_size: {self.config.min_node_size}",
            f"terminal nodes: {self.n_terminal}",
            "",
        ]

        def walk(node_id: int, depth: int):
            node = self.nodes[node_id]
            pad = "  " * depth
            if node.children is None:
                med = _median_survival(node.curve)
                med_s = f"{med:.6g}" if med is not None else "NA"
                lines.append(
                    f"{pad}leaf #{node.terminal_number} "
                    f"(n={node.member_indices.size}, median={med_s})"
                )
            else:
                sp = node.split
                lines.append(
                    f"{pad}node {node.id}: {self.covariate_names[sp.covariate_index]} "
                    f"<= {sp.cutoff:.6g} (p={sp.p_value:.6g}, signed={sp.signed_l1:.6g}, "
                    f"n={node.member_indices.size})"
                )
                walk(node.children[0], depth + 1)
                walk(node.children[1], depth + 1)

        walk(self.root_id, 0)
        return "\n".join(lines) + "\n"

    def to_dot(self) -> str:
        lines = ["digraph survival_tree {", "  node [shape=box];"]
        for node in sorted(self.nodes.values(), key=lambda n: n.id):
            if node.children is None:
                med = _median_survival(node.curve)
                med_s = f"{med:.4g}" if med is not None else "NA"
                label = (
                    f"node {node.terminal_number}\\nn={node.member_indices.size}"
                    f"\\nmedian={med_s}"
                )
                lines.append(f'  n{node.id} [label="{label}", shape=ellipse];')
            else:
                sp = node.split
                label = f"{self.covariate_names[sp.covariate_index]} <= {sp.cutoff:.4g}"
                lines.append(f'  n{node.id} [label="{label}"];')
        for node in sorted(self.nodes.values(), key=lambda n: n.id):
            if node.children is not None:
                lines.append(f"  n{node.id} -> n{node.children[0]};")
                lines.append(f"  n{node.id} -> n{node.children[1]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _median_survival(curve: StepFunction | None) -> float | None:
    if curve is None:
        return None
    below = curve.values <= 0.5
    if not below.any():
        return None
    return float(curve.jump_times[np.argmax(below)])


def enumerate_splits(values: np.ndarray) -> np.ndarray:
    """Feasible cutoffs: sorted unique observed values minus the maximum."""
    uniq = np.unique(np.asarray(values, dtype=float))
    return uniq[:-1]


def _candidate_splits(data: Dataset, config: TreeConfig, rng_for_size) -> list[SplitCandidate]:
    """All feasible splits of one node with their p-values, unoriented."""
    reps_cache: dict[int, np.ndarray] = {}
    out = []
    for j in range(data.n_covariates):
        for cutoff in enumerate_splits(data.covariates[:, j]):
            lo = data.covariates[:, j] <= cutoff
            n_lo = int(lo.sum())
            if config.max_censoring_fraction_child is not None:
                cens_lo = 1.0 - data.event[lo].mean()
                cens_hi = 1.0 - data.event[~lo].mean()
                if max(cens_lo, cens_hi) > config.max_censoring_fraction_child:
                    continue
            if config.method == "cge":
                obs, signed = l1_statistic(
                    data.time[lo], data.event[lo], data.time[~lo], data.event[~lo], config.copula
                )
                if n_lo not in reps_cache:
                    reps_cache[n_lo] = permutation_replicates(
                        data.time, data.event, n_lo, config.copula, config.n_perm,
                        rng_for_size(n_lo),
                    )
                p = (int((reps_cache[n_lo] >= obs).sum()) + 1) / (config.n_perm + 1)
            else:
                if not data.event.any():
                    continue
                res = logrank_test(
                    data.time[lo], data.event[lo], data.time[~lo], data.event[~lo]
                )
                p = res.p_value
                # fewer events than expected in the low group -> longer survival
                signed = -res.o_minus_e1
            out.append(
                SplitCandidate(
                    covariate_index=j,
                    cutoff=float(cutoff),
                    p_value=p,
                    signed_l1=signed,
                    left_count=n_lo,
                    right_count=len(data) - n_lo,
                    low_goes_left=True,  # oriented later
                )
            )
    return out


def fit_tree(data: Dataset, config: TreeConfig) -> SurvivalTree:
    """Recursive binary partitioning with the permutation test as split criterion.

    Deterministic given (data, config): every candidate test draws from a
    substream keyed by the node's path and the candidate's left-group size, so
    neither evaluation order nor worker count can change the result.
    """
    if len(data) == 0:
        raise ValueError("empty dataset")
    tree = SurvivalTree(config=config, covariate_names=list(data.names))
    next_id = [0]

    def rng_factory(path: tuple[int, ...]):
        path_int = sum(b << i for i, b in enumerate(path))

        def rng_for_size(n_lo: int):
            ss = np.random.SeedSequence(config.seed, spawn_key=(len(path), path_int, n_lo))
            return np.random.default_rng(ss)

        return rng_for_size

    def grow(indices: np.ndarray, path: tuple[int, ...]) -> int:
        node_id = next_id[0]
        next_id[0] += 1
        node = TreeNode(id=node_id, member_indices=indices)
        tree.nodes[node_id] = node
        sub = data.subset(indices)
        if len(sub) >= config.min_node_size:
            candidates = _candidate_splits(sub, config, rng_factory(path))
            if candidates:
                best = min(
                    candidates,
                    key=lambda c: (c.p_value, -abs(c.signed_l1), c.covariate_index, c.cutoff),
                )
                if best.p_value < config.p_threshold:
                    lo = sub.covariates[:, best.covariate_index] <= best.cutoff
                    low_goes_left = best.signed_l1 > 0.0
                    node.split = SplitCandidate(
                        covariate_index=best.covariate_index,
                        cutoff=best.cutoff,
                        p_value=best.p_value,
                        signed_l1=best.signed_l1,
                        left_count=int(lo.sum()) if low_goes_left else int((~lo).sum()),
                        right_count=int((~lo).sum()) if low_goes_left else int(lo.sum()),
                        low_goes_left=low_goes_left,
                    )
                    left_idx = indices[lo] if low_goes_left else indices[~lo]
                    right_idx = indices[~lo] if low_goes_left else indices[lo]
                    left_id = grow(left_idx, path + (0,))
                    right_id = grow(right_idx, path + (1,))
                    node.children = (left_id, right_id)
                    return node_id
        return node_id

    root = grow(np.arange(len(data)), ())
    tree.root_id = root

    # depth-first left-to-right terminal numbering; terminal curves under the copula
    counter = [0]

    def number(node_id: int):
        node = tree.nodes[node_id]
        if node.children is None:
            counter[0] += 1
            node.terminal_number = counter[0]
            sub = data.subset(node.member_indices)
            node.curve = cge(sub.time, sub.event, config.copula)
        else:
            number(node.children[0])
            number(node.children[1])

    number(root)
    return tree
