"""linequiv: a lab for testing linear equivalence of Boolean functions.

Exact Fourier analysis over GF(2)^n, approximate spectral norms by LP,
exhaustive linear-distance oracles, two-party decision protocols over an
audited bit channel, and the greedy separation map behind the
equality-to-isomorphism reduction.
"""

__version__ = "0.1.0"

from .boolfn import (
    BooleanFunction,
    RealFunction,
    Spectrum,
    character,
    compose_linear,
    distance,
    evaluate,
    generate,
    inverse_wht,
    load_table,
    save_table,
    sign_of,
    wht,
)
from .channel import Transcript, decode_integer, encode_integer
from .errors import GuardError, ProtocolError, SamplingError, SimplexIterationError
from .gf2 import (
    GF2Matrix,
    GF2Vector,
    enumerate_gl,
    extend_to_basis,
    mat_inverse,
    mat_vec,
    random_nonsingular,
)
from .lindist import (
    LinDistResult,
    affine_distance,
    canonical_form,
    is_lin_isomorphic,
    linear_distance,
)
from .phimap import (
    PhiMap,
    binary_entropy,
    choose_m,
    construct_phi,
    hamming_ball_size,
    liniso_ball,
    reduce_equ,
    verify_phi,
)
from .protocol import (
    PromiseInstance,
    run_deterministic,
    run_private_coin,
    run_public_coin,
)
from .spectral import (
    ApproxNormWitness,
    JuntaApproximation,
    SampledSignRepresentation,
    approx_spectral_norm,
    bs_sample,
    junta_approximation,
    spectral_norm,
    truncate_spectrum,
)

__all__ = [name for name in dir() if not name.startswith("_")]
