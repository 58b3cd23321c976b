"""
precoding scheme evaluators
one class per scheme, each turning a trial context into per-user SINRs
"""

from .base import PrecodingScheme, TrialContext
from .th_perfect import THPerfectScheme
from .th_quantized import THQuantizedScheme
from .zf_perfect import ZFPerfectScheme
from .zf_quantized import ZFQuantizedScheme

__all__ = [
    "PrecodingScheme",
    "TrialContext",
    "THPerfectScheme",
    "THQuantizedScheme",
    "ZFPerfectScheme",
    "ZFQuantizedScheme"
]
