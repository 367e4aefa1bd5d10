"""Validation toolkit for multipartite process matrices: operator-basis
decomposition, signalling classification, tensor-product compatibility
checks, and an independent probability-normalization oracle."""

__version__ = "0.1.0"

from .hsbasis import HSBasis, HSTerm, decompose, make_basis, reconstruct
from .linalg import min_eigenvalue, partial_trace, permute_subsystems, tensor
from .process import (
    Party,
    PartyLayout,
    PartyReduction,
    PartyTag,
    ProcessMatrix,
    TermSignature,
    Tolerances,
    ValidityReport,
    classify_term,
    is_valid_process,
    reduced_process,
    signalling_directions,
)
from .product import (
    PartyPairing,
    ProductReport,
    SequenceReport,
    check_sequence,
    find_blocking_pairs,
    tensor_product,
    two_party_product_invalid,
)
from .oracle import (
    ChoiChannel,
    OracleVerdict,
    normalization_oracle,
    probability,
    random_cptp,
)
from .gallery import (
    GalleryEntry,
    classical_corr,
    gallery_entry,
    gallery_names,
    maximally_mixed,
    mixture,
    oneway_channel_process,
    random_valid_process,
    state_process,
    twoway_channel_process,
)
from .io_format import parse, serialize

__all__ = [
    "HSBasis",
    "HSTerm",
    "decompose",
    "make_basis",
    "reconstruct",
    "min_eigenvalue",
    "partial_trace",
    "permute_subsystems",
    "tensor",
    "Party",
    "PartyLayout",
    "PartyReduction",
    "PartyTag",
    "ProcessMatrix",
    "TermSignature",
    "Tolerances",
    "ValidityReport",
    "classify_term",
    "is_valid_process",
    "reduced_process",
    "signalling_directions",
    "PartyPairing",
    "ProductReport",
    "SequenceReport",
    "check_sequence",
    "find_blocking_pairs",
    "tensor_product",
    "two_party_product_invalid",
    "ChoiChannel",
    "OracleVerdict",
    "normalization_oracle",
    "probability",
    "random_cptp",
    "GalleryEntry",
    "classical_corr",
    "gallery_entry",
    "gallery_names",
    "maximally_mixed",
    "mixture",
    "oneway_channel_process",
    "random_valid_process",
    "state_process",
    "twoway_channel_process",
    "parse",
    "serialize",
]
