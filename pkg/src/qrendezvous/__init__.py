"""Quasi-random channel hopping for anonymous two-user rendezvous."""
from .codec import (
    TritCodeword,
    ValidationReport,
    codeword_length,
    encode_4b5b,
    make_codeword,
    verify_class,
)
from .hopping import (
    ChannelSet,
    ModularClockParams,
    MultiRadioUser,
    QrUserState,
    modular_clock_step,
    multi_radio_next,
    partition_round_robin,
    qr_next,
    random_step,
    two_primes_at_least,
)
from .sim import TrialConfig, TrialResult, run_trial, sample_channel_sets, sample_drift, simulate
from .stats import BoundSet, SweepStats, aggregate, ettr_bound, mttr_bounds

__version__ = "0.1.0"
