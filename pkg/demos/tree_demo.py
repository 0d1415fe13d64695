"""Fit a survival tree on the bundled liver-disease-style dataset.

Each internal node splits on the covariate/cutoff pair whose two-sample
permutation test has the smallest p-value; splitting stops when no candidate
reaches the threshold. Terminal nodes are numbered by prognosis: leaf #1 has
the longest survival.
"""

from pathlib import Path

from cgesurv import CopulaSpec, fit_tree, load_csv
from cgesurv.data import bundled_dataset_path
from cgesurv.tree import TreeConfig

data = load_csv(bundled_dataset_path())
print(f"{len(data)} subjects, {data.n_covariates} covariates: {', '.join(data.names)}")
print(f"censoring fraction: {data.censoring_fraction():.3f}\n")

config = TreeConfig(
    copula=CopulaSpec.from_tau("clayton", 0.5),
    p_threshold=0.01,
    n_perm=299,
    seed=0,
    min_node_size=10,
)
tree = fit_tree(data, config)

print(tree.to_text())

Path("tree.dot").write_text(tree.to_dot())
print("wrote tree.dot  (render with: dot -Tpng tree.dot -o tree.png)")

# median survival per prognosis group
for node in tree.terminal_nodes():
    curve = node.curve
    print(
        f"leaf #{node.terminal_number}: {node.member_indices.size} subjects, "
        f"S(2) = {curve(2.0):.3f}"
    )
