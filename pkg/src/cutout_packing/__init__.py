"""Best packing on one-dimensional cut-out sets and self-similar fractals."""

from .constants import content_cutout, content_selfsimilar, moran_dimension, p_const, series_A
from .errors import (
    CertificateInvalid,
    DependentSystem,
    Indeterminate,
    InputError,
    PackingError,
    SandwichNotClosed,
    SeparationViolated,
)
from .geometry import CutOutSet, SelfSimilarSystem, prefractal, tube_volume
from .massdist import MassInstance, exact_cover_count, greedy_mass_blocks, tail_upper_bound
from .packing import greedy_pack, pack_cutout, pack_exact_attractor
from .renewal import build_profile, count_function, packing_constant
from .sequences import BlockGeometric, Explicit, FromSystem, PowerLaw

__all__ = [
    "BlockGeometric", "CertificateInvalid", "CutOutSet", "DependentSystem", "Explicit", "FromSystem",
    "Indeterminate", "InputError", "MassInstance", "PackingError", "PowerLaw", "SandwichNotClosed",
    "SelfSimilarSystem", "SeparationViolated", "build_profile", "content_cutout", "content_selfsimilar",
    "count_function", "exact_cover_count", "greedy_mass_blocks", "greedy_pack", "moran_dimension",
    "p_const", "pack_cutout", "pack_exact_attractor", "packing_constant", "prefractal", "series_A",
    "tail_upper_bound", "tube_volume",
]
