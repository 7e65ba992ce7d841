from .certification import (
    Verdict, LipschitzProfile, TangentReport, BoundarySampler, FixedSampler,
    forward_lipschitz_profile, tangent_nonempty_check, DEFAULT_DELTAS,
)
from .lemmas import ProbeReport, ProbeError, lemma2_probe, lemma1_probe
