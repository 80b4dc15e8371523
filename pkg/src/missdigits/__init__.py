"""Integers with missing digits in several bases: exact thickness, certificates and search."""

__version__ = "0.1.0"

from .cantor import INF, LevelSetSpec, level_set, thickness_exact, thickness_formula
from .expansions import MissingDigitSpec, avoids, expand_nat
from .fy import certify_common_integer, check_fy, find_alignment, k2_constant, solve_threshold_M
from .numeric import Enclosure, Interval, IntervalUnion
from .search import SearchQuery, count_common, generate_avoiding, search_common

__all__ = [
    "INF",
    "Enclosure",
    "Interval",
    "IntervalUnion",
    "LevelSetSpec",
    "MissingDigitSpec",
    "SearchQuery",
    "avoids",
    "certify_common_integer",
    "check_fy",
    "count_common",
    "expand_nat",
    "find_alignment",
    "generate_avoiding",
    "k2_constant",
    "level_set",
    "search_common",
    "solve_threshold_M",
    "thickness_exact",
    "thickness_formula",
]
