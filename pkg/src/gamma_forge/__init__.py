"""Group-labeled graphs: immersions, circuit packing and tree-cut structure."""
from .decomp import (
    Certificate,
    ContainerSystem,
    StructureResult,
    TreeCutDecomposition,
    build_tree_cut,
    certificate_value,
    check_converse,
    core_certificate,
    refine_containers,
    set_value,
    structure_decompose,
    theorem_t,
    torso,
    verify_structure,
)
from .errors import (
    BudgetExceeded,
    GammaForgeError,
    InvalidCertificate,
    InvalidParameter,
    InvalidTransition,
    MalformedImmersion,
    NoProperSubgroup,
    NotGenerating,
    ParseError,
    PreconditionError,
    QualifyingCircuitExists,
    RichFlowerFound,
)
from .flower import generating_flower, plain_flower, rich_flower
from .group import FiniteGroup, Subgroup, generate_subgroup, make_cyclic, make_symmetric
from .immerse import Immersion, find_immersion, forbids, verify_immersion
from .lgraph import Dart, LabeledGraph, Trail
from .pack import PackOrCover, SimpleFlower, erdos_posa

__version__ = "0.1.0"
