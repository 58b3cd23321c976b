import logging

import numpy as np

from .base import PrecodingScheme, TrialContext
from ..log import sim_logger_handler
from ..models import TH_QUANTIZED
from ..precoding import build_quantized, sinr_quantized

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)


class THQuantizedScheme(PrecodingScheme):
    """
    TH precoding designed on the fed-back codewords

    the SINR keeps the residual leakage eps_k sin^2 as interference
    """
    name = TH_QUANTIZED
    uses_feedback = True

    def sinr(self, context: TrialContext, powers: np.ndarray) -> np.ndarray:
        qcsi = self._require_feedback(context)
        precoder = build_quantized(context.channels, qcsi, context.constellation, float(powers[-1]))
        gamma, eps = sinr_quantized(context.channels, qcsi, precoder, powers)
        logger.debug(f"quantized TH trial: eps {np.round(eps, 4).tolist()}, sin2 {np.round(qcsi.sin2, 4).tolist()}")
        return gamma
