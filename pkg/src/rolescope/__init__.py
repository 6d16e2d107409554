"""Tools for telling community-preserving and role-preserving embeddings apart.

The package builds both families of node embedding from first principles
(random walks, walk-count matrices, feature diffusion on the community side;
graphlet orbits, motif graphs, feature walks and factorized roles on the
structural side) and ships a diagnostic engine that scores an embedding
against community, role, and proximity ground truth.
"""

from .diagnostics import (
    MECHANISMS,
    SCENARIOS,
    DiagnosticReport,
    borgatti_everett,
    diagnose,
    scenario_suite,
    verdict_matrix,
)
from .diffusion import (
    ConvergenceReport,
    DiffusionConfig,
    diffuse,
    motif_feature_one_step,
    spectrum_check,
    verify_convergence_rw,
    verify_convergence_sym,
)
from .embedding import (
    Embedding,
    cooccurrence,
    cosine_similarity,
    embed_community,
    embed_factorized_roles,
    embed_implicit,
    embed_role,
    factorize_pmi,
    pairwise_cosine,
    ppmi_matrix,
)
from .equivalence import (
    EquivalenceReport,
    epsilon_structural_similarity,
    exact_role_partition,
    feature_equivalence_partition,
    kernel_similarity,
    regular_equivalence_partition,
    structural_equivalence_partition,
    verify_exact_role_assignment,
    verify_strong_structural_assignment,
)
from .errors import GraphError, ParseError, RolescopeError, ValidationError
from .features import FeatureMatrix
from .graphlets import (
    GRAPHLET_NAMES,
    ORBIT_NAMES,
    MotifGraph,
    count_graphlets_global,
    count_orbits,
    motif_graph,
    orbit_feature_matrix,
)
from .graphs import (
    Graph,
    Partition,
    RoleGraph,
    build_role_graph,
    connected_components,
    degree_vector,
    disjoint_union,
    gen_barbell,
    gen_block_chung_lu,
    gen_clique,
    gen_complete_bipartite,
    gen_star,
    is_bipartite,
    load_edge_list,
)
from .io import (
    read_embedding,
    read_partition,
    read_walks,
    write_edge_list,
    write_embedding,
    write_feature_matrix,
    write_motif_graph,
    write_orbit_counts,
    write_partition,
    write_report,
    write_role_factorization,
    write_type_mapping,
    write_walks,
)
from .roles import (
    RoleFactorization,
    TypeMapping,
    assign_roles,
    feature_walks,
    fit_type_mapping,
    nmf,
    recursive_features,
)
from .walks import (
    CommunityStats,
    TransitionModel,
    WalkCorpus,
    community_stats,
    containment_bounds,
    containment_report,
    estimate_containment,
    sample_walks,
    walk_count_matrix,
    walk_sum_matrix,
)

__version__ = "0.1.0"
