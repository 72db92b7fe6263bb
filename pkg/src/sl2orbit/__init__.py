"""Conjugation invariants, stability and trace-map inversion for tuples of 2x2 matrices."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    NTuple,
    Word,
    commutator,
    conjugate_tuple,
    random_sl2,
    random_tuple,
    trace_word,
    trace_words,
    validate_tuple,
    word_eval,
)
from .invariants import (  # noqa: E402
    delta,
    fingerprint,
    fingerprints_match,
    gram,
    nu,
    sigma,
    tau,
    vn_fingerprint,
)
from .structure import (  # noqa: E402
    conjugator,
    culler_shalen_sample,
    fix_generators,
    invariant_line_oracle,
    is_irreducible,
    is_stable,
    transposition_normal_form,
    triangularize,
)
from .magnus import (  # noqa: E402
    enumerate_fiber,
    fiber_cross_check,
    forward_That_n,
    forward_Tn,
    invert_on_Z12,
    invert_That_n,
    invert_Tn,
)
from .kernels import BACKEND  # noqa: E402
