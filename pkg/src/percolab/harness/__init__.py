from .experiments import (arm_scaling, compare_hitting, mc_crossing,
                          mc_hitting, perc_semiball_hitting,
                          sle_semiball_hitting)
from .manifest import RunManifest
from .stats import EstimateRecord, KSResult, ks_1sample, ks_2samp

__all__ = [
    "arm_scaling", "compare_hitting", "mc_crossing", "mc_hitting",
    "perc_semiball_hitting", "sle_semiball_hitting", "RunManifest",
    "EstimateRecord", "KSResult", "ks_1sample", "ks_2samp",
]
