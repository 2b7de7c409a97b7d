from .numerics import (
    derive_seed,
    finite_diff_check,
    init_mlp,
    make_rng,
    mlp_forward,
    mlp_forward_rows,
    mlp_jvp,
    seeded_init,
    sinusoidal_pe,
    softmax_rows,
)

__all__ = [
    'derive_seed',
    'finite_diff_check',
    'init_mlp',
    'make_rng',
    'mlp_forward',
    'mlp_forward_rows',
    'mlp_jvp',
    'seeded_init',
    'sinusoidal_pe',
    'softmax_rows'
]
