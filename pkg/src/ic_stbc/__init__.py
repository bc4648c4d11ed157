"""Full-diversity Toeplitz space-time block codes for two-user MIMO interference channels."""

from .analysis import (
    AlphaEstimate,
    PepPoint,
    RankReport,
    diversity_slope,
    estimate_alpha,
    full_rank_check,
    monte_carlo_pep,
    pep_upper_bound,
)
from .channel import ChannelRealization, draw_channel, draw_noise
from .codebook import (
    CodeSpec,
    Codeword,
    EquivalentChannel,
    GuardExceededError,
    RotationMatrix,
    compute_mu,
    encode,
    encode_multilayer,
    lift_channel,
    make_rotation,
    verify_product_distance,
)
from .kernels import BACKEND
from .modulation import Constellation, demap_hard, difference_set, make_qam, map_bits
from .numerics import RankDeficientError, numeric_rank, projection_complement
from .receiver import DecodeResult, ProjectedSystem, ao_mmse, genie_single_user, group_zf, ml_decode
from .simulator import BerRecord, ConfigError, SimConfig, emit_csv, parse_csv, run_sweep, run_trial

__version__ = "0.1.0"

__all__ = [
    "AlphaEstimate",
    "PepPoint",
    "RankReport",
    "diversity_slope",
    "estimate_alpha",
    "full_rank_check",
    "monte_carlo_pep",
    "pep_upper_bound",
    "ChannelRealization",
    "draw_channel",
    "draw_noise",
    "CodeSpec",
    "Codeword",
    "EquivalentChannel",
    "GuardExceededError",
    "RotationMatrix",
    "compute_mu",
    "encode",
    "encode_multilayer",
    "lift_channel",
    "make_rotation",
    "verify_product_distance",
    "BACKEND",
    "Constellation",
    "demap_hard",
    "difference_set",
    "make_qam",
    "map_bits",
    "RankDeficientError",
    "numeric_rank",
    "projection_complement",
    "DecodeResult",
    "ProjectedSystem",
    "ao_mmse",
    "genie_single_user",
    "group_zf",
    "ml_decode",
    "BerRecord",
    "ConfigError",
    "SimConfig",
    "emit_csv",
    "parse_csv",
    "run_sweep",
    "run_trial",
]
