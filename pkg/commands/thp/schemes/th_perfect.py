import numpy as np

from .base import PrecodingScheme, TrialContext
from ..models import TH_PERFECT
from ..precoding import build_perfect, sinr_perfect


class THPerfectScheme(PrecodingScheme):
    """TH precoding designed on the true channel"""
    name = TH_PERFECT
    uses_feedback = False

    def sinr(self, context: TrialContext, powers: np.ndarray) -> np.ndarray:
        # the receiver scaling depends on P, the SINR does not
        precoder = build_perfect(context.channels, context.constellation, float(powers[-1]))
        return sinr_perfect(context.channels, precoder, powers)
