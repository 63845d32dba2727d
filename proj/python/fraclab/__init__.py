from ._fraclab import (
    FraclabError,
    __version__,
    badic,
    cantor_bump,
    cantor_distance,
    cantor_function,
    caputo,
    caputo_power,
    fbm_path,
    ito_check,
    nonzero_atom_weights,
    phi_hat,
    pth_variation,
    rl_integral,
    run,
    takagi,
    variation_table,
)

__all__ = [
    "FraclabError",
    "__version__",
    "badic",
    "cantor_bump",
    "cantor_distance",
    "cantor_function",
    "caputo",
    "caputo_power",
    "fbm_path",
    "ito_check",
    "nonzero_atom_weights",
    "phi_hat",
    "pth_variation",
    "rl_integral",
    "run",
    "takagi",
    "variation_table",
]
