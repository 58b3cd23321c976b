from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..analysis import instantaneous_rates
from ..models import ChannelSet, Constellation, QuantizedCSI


@dataclass(frozen=True)
class TrialContext:
    """
    everything a scheme needs for one monte carlo trial

    params:
        channels: true channel realization
        constellation: QAM constellation (enters through kappa)
        qcsi: quantized directions, None for perfect-CSI trials
    """
    channels: ChannelSet
    constellation: Constellation
    qcsi: Optional[QuantizedCSI] = None


class PrecodingScheme(ABC):
    """precoding scheme abstract base class"""
    # scheme name as written to the CSV
    name: str = ''
    # whether the scheme is evaluated once per feedback size
    uses_feedback: bool = False

    @abstractmethod
    def sinr(self, context: TrialContext, powers: np.ndarray) -> np.ndarray:
        """
        per-user SINR of one trial over a power grid

        params:
            context: trial context
            powers: linear transmit powers, shape (L,)

        return:
            (L, K) array

        exception:
            DegenerateChannelError: the (quantized) channel cannot be factorized
        """
        pass

    def rates(self, context: TrialContext, powers: np.ndarray) -> np.ndarray:
        """instantaneous per-user rates log2(1 + SINR), shape (L, K)"""
        return instantaneous_rates(self.sinr(context, np.asarray(powers, dtype=float)))

    def _require_feedback(self, context: TrialContext) -> QuantizedCSI:
        if context.qcsi is None:
            raise ValueError(f"failed to evaluate {self.name}: trial context carries no quantized CSI")
        return context.qcsi
