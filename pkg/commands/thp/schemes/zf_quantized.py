import numpy as np

from .base import PrecodingScheme, TrialContext
from ..models import ZF_QUANTIZED
from ..precoding import build_zf, sinr_zf


class ZFQuantizedScheme(PrecodingScheme):
    """zero-forcing beamforming on the fed-back codewords, leakage measured on the true channel"""
    name = ZF_QUANTIZED
    uses_feedback = True

    def sinr(self, context: TrialContext, powers: np.ndarray) -> np.ndarray:
        qcsi = self._require_feedback(context)
        return sinr_zf(context.channels, build_zf(context.channels, qcsi), powers)
