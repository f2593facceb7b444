"""Channel quantities, polarization and polar codes on discrete memoryless channels."""

from .channel import (Channel, ChannelReport, InputDist, bec, bhattacharyya, bsc, capacity,
                      channel_report, critical_rate, cutoff_rate, gallager_e0, is_symmetric,
                      optimize_input, qec, random_coding_exponent, symmetric_capacity,
                      symmetric_cutoff_rate)
from .ensembles import (BlockCode, EnumerationTooLarge, ensemble_pairwise_average,
                        guesswork_ensemble, guesswork_exact, massey_split,
                        pairwise_error_exact, pinsker_analysis, union_bound)
from .polar_code import (DecodingConflict, PolarCodeSpec, ReceivedBlock, construct, design,
                         encode, fer_union_bound, polar_transform, sc_decode, sc_decode_llr,
                         transform_matrix)
from .polarize import (AlphabetTooLarge, BecProfile, SynthChannel, ZProfile, bec_polarize,
                       normalized_cutoff, polar_pair, polarization_stats,
                       synthesize_all, synthesize_bit_channel, z_bound_recursion)
from .sim import SimConfig, SimReport, run_sim, sweep

__version__ = "0.1.0"
