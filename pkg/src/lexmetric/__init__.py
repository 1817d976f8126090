"""Legal games: regulations as rule subsets, distances between them, and
agreement search over player preferences."""

from .consensus import (
    PlayerPreference,
    PreferenceProfile,
    Preorder,
    TotalPreorderRanking,
    check_linear_extension,
    classify_signer,
    closest_pareto_deal,
    distance_linear_order,
    is_compatible,
    is_tau_lsc,
    maximal_elements,
    min_consensus_radius,
    pareto_deals,
)
from .divergence import (
    check_coherence,
    kl_social_divergence,
    lgame_premetric,
    symmetrize_max,
    symmetrize_plus,
)
from .errors import LexError
from .gamegraph import (
    GameOfGames,
    LegalPath,
    ball,
    build_graph,
    is_r_step,
    is_subgame,
    k_shortest_incremental_paths,
    k_shortest_paths,
    path_distance,
    shortest_path,
)
from .lgame import (
    EventSpace,
    Law,
    LGame,
    ProbabilityModel,
    PunishmentModel,
    Regulation,
    Society,
    entropy,
    expected_severity,
    is_titere,
    mean_probability,
)

__version__ = "0.1.0"
