"""Multi-part intersecting families: constructions, exact formulas, shifting and exact search."""

from .core import (
    EMPTY,
    Element,
    Family,
    FamilyClass,
    FamilyError,
    FamilyView,
    MultiPartSet,
    PartialSet,
    PartStructure,
    classify,
    common_elements,
    count_supersets,
    dumps_family,
    enumerate_layer,
    intersects,
    loads_family,
    make_part_structure,
    structure,
)
from .constructions import (
    f_hm_t_S,
    f_t_ell,
    frankl_product,
    hilton_milner_family,
    triangle_family,
)
from .formulas import (
    TSPair,
    binomial,
    case2_f,
    frankl_bound,
    is_unimodal_g,
    m_hm,
    m_hm_t_S,
    m_max,
    m_t_ell,
)
from .search import Mode, SearchResult, build_intersection_graph, max_family
from .shifting import (
    ShiftIndex,
    check_projection_lemma,
    family_order,
    is_shifted,
    project,
    shift_family,
    shift_set,
    shifted_closure,
    stabilize_nontrivial,
)

__version__ = "0.1.0"
