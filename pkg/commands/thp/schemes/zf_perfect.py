import numpy as np

from .base import PrecodingScheme, TrialContext
from ..models import ZF_PERFECT
from ..precoding import build_zf, sinr_zf


class ZFPerfectScheme(PrecodingScheme):
    """zero-forcing beamforming on the true channel, equal power per user"""
    name = ZF_PERFECT
    uses_feedback = False

    def sinr(self, context: TrialContext, powers: np.ndarray) -> np.ndarray:
        return sinr_zf(context.channels, build_zf(context.channels), powers)
