"""Rough-mereology toolkit: part-whole algebra with weights, graded
containments, granular classification, a granule-indexed many-valued logic,
degree-propagating fusion networks, and rectangle geometry with a formation
navigation simulator."""

from .dataset import (
    DecisionSystem,
    DuplicateFeature,
    InformationSystem,
    IngestionError,
    MissingDecisionColumn,
    MissingValue,
    NA_VALUE,
    RaggedRow,
    UnknownFeature,
    UnknownObject,
    dis,
    discretize,
    ind_fraction,
    load_csv,
    row_dis_count,
)
from .errors import (
    CarrierMismatch,
    ClassOfEmptyFamily,
    DegreeUnderflow,
    FoldError,
    MereomlError,
    NetworkError,
)
from .geometry import (
    Between,
    Formation,
    FormationParseError,
    LogEntry,
    MaxDist,
    NavigationLog,
    NotBetween,
    PotentialField,
    Rect,
    StepRecord,
    Violation,
    World,
    area_inclusion,
    between_extent,
    build_potential,
    check_formation,
    extent,
    load_world,
    navigate,
    overlap_area,
    parse_formation,
    print_formation,
    rbtw,
    rho,
    rho_normalized,
    rnear,
    write_trajectory_csv,
    write_trajectory_svg,
)
from .granulation import (
    Covering,
    DeciderReport,
    Granule,
    GranularReflection,
    RadiusResult,
    all_granules,
    classify,
    classify_many,
    granular_mirror,
    granule,
    irreducible_covering,
    majority_value,
    make_inclusion,
    radius_grid,
    run_decider,
    stratified_folds,
)
from .inclusion import (
    ArchimedeanInclusion,
    ExponentialInclusion,
    FeatureWeights,
    LukasiewiczInclusion,
    ResidualInclusion,
    RoughInclusion,
    WeightRatioInclusion,
    exp_compose,
    exp_row_degree,
    fuzzy_similarity,
    lukasiewicz_g,
    lukasiewicz_h,
    lukasiewicz_row_degree,
    residuum_lukasiewicz,
    rs_star_archimedean,
    rs_star_exp,
    rs_star_is,
    rs_star_residual,
    rs_star_weight,
    t_lukasiewicz,
)
from .logic import (
    And,
    Atom,
    GranuleSet,
    Implies,
    Not,
    NuMode,
    Or,
    ParseError,
    RuleAudit,
    UnknownValue,
    collapse_value,
    extension,
    graded_truth,
    is_true_at,
    is_valid,
    iter_atoms,
    meaning,
    nu,
    parse_formula,
    print_formula,
    rule_audit,
    satisfies,
)
from .mereo import (
    EMPTY,
    Carrier,
    Entity,
    WeightFn,
    cls,
    complement,
    entity_product,
    entity_sum,
    exterior,
    implication,
    is_valid_implication,
    overlap,
    part,
    rel_complement,
    subst,
    weight,
)
from .net import (
    Agent,
    DegreeTrace,
    Network,
    TraceStep,
    classify_to_target,
    consumer_from,
    fuse_degrees,
    fuse_entities,
    fuse_formulas,
    fuse_granules,
    load_network,
    propagate,
)

__version__ = "0.1.0"
