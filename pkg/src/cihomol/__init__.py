"""Exact homological algebra over Artinian monomial complete intersections."""

from .errors import CIHomolError, InvalidEmbeddingError, ParseError, RingMismatchError, UnsupportedRingError, UsageError
from .exactalg import FieldSpec
from .ring import CIRing, Embedding, LinearForm, enumerate_points, power_subring_embedding, regular_module
from .module import (
    IsoResult,
    IsoVerdict,
    Module,
    ModuleMap,
    direct_sum,
    dual,
    free_module,
    hom_dim,
    hom_space,
    is_free,
    iso_test,
    length,
    min_generators,
    quotient,
    quotient_by_form_power,
    residue_field,
    restrict_scalars,
    submodule,
)
from .homalg import (
    ComplexityKind,
    ComplexityVerdict,
    Resolution,
    ResolutionCache,
    betti_numbers,
    classify_complexity,
    cosyzygy,
    extension,
    extension_sequence,
    is_exact,
    minimal_cover,
    nth_syzygy,
    presentation,
    resolve,
    stable_reduce,
    syzygy,
    tensor,
    tor,
    tor_dims,
)
from .support import Disjointness, DisjointResult, locate_periodic_support, rank_point_membership, rank_variety, supports_disjoint
from .gk import GClass, divisibility_report, gclass, subgroup_of_lengths
from .construct import FamilyKind, FamilySpec, avoiding_family, axis_quotients, cx1_family, h_family, random_modules
from .suites import SUITES, SuiteReport

__version__ = "0.1.0"
