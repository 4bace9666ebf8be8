"""Conditionally free products of pointed Hilbert spaces at finite truncation
depth: word bases, operator embeddings, independence checkers, the doubled
free-copies construction, and the two-state R-transform tower."""

from .embeddings import (EmbeddedOperator, OperatorPair, embed_boolean, embed_cfree,
                         embed_free, embed_monotone, embed_orthogonal)
from .reports import CheckReport
from .series import TruncatedLaurentSeries, cfree_r_transform
from .spaces import (ALPHA, BETA, H_SIDE, K_SIDE, BasisWord, PointedSpace,
                     ProductBasis, build_product_basis)
from .states import MomentData, alternating_word_vector, mixed_moment, psi_center, \
    vector_state

__all__ = [
    "ALPHA", "BETA", "H_SIDE", "K_SIDE",
    "BasisWord", "PointedSpace", "ProductBasis", "build_product_basis",
    "OperatorPair", "EmbeddedOperator",
    "embed_cfree", "embed_free", "embed_boolean", "embed_monotone",
    "embed_orthogonal",
    "vector_state", "mixed_moment", "psi_center", "alternating_word_vector",
    "MomentData", "TruncatedLaurentSeries", "cfree_r_transform",
    "CheckReport",
]

__version__ = "0.1.0"
