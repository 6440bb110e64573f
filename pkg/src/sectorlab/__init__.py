"""sectorlab: desk-scale experiments on Gaussian almost primes in narrow sectors."""

__version__ = "0.1.0"

from .gaussian import (  # noqa: F401
    CanonicalElement,
    GaussianInt,
    angular_separation_leq,
    arg_mod_quarter,
    canonicalize,
    norm,
    split_rational_prime,
    sqrt_minus_one_mod_prime,
    tau_gaussian,
)
from .exppairs import ExactPair, a_process, apply_word, b_process, search_optimal  # noqa: F401
from .density import (  # noqa: F401
    density1_sigma_interval,
    density2_sigma_interval,
    lvt_exponents,
    minimal_constant,
    verify_constant,
)
