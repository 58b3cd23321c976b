import logging

import numpy as np

from .errors import DegenerateChannelError, DomainError
from .log import sim_logger_handler
from .models import ChannelSet
from .numerics import sample_complex_gaussian

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)

# a user whose channel norm falls below this is redrawn
MIN_CHANNEL_NORM = 1e-12
MAX_REDRAWS = 16


def draw_channels(rng: np.random.Generator, n_T: int, K: int) -> ChannelSet:
    """
    draw one i.i.d. Rayleigh realization of all users' channels

    params:
        rng: random generator
        n_T: transmit antennas
        K: users, 1 <= K <= n_T

    return:
        ChannelSet with rows in draw order
    """
    if not 1 <= K <= n_T:
        raise DomainError(f"failed to draw channels: need 1 <= K <= n_T, got K={K}, n_T={n_T}")

    for attempt in range(MAX_REDRAWS):
        H = sample_complex_gaussian(rng, K, n_T)
        if np.all(np.linalg.norm(H, axis=1) > MIN_CHANNEL_NORM):
            return ChannelSet.from_matrix(H)
        logger.warning(f"vanishing channel norm on draw {attempt + 1}, redrawing")

    raise DegenerateChannelError(f"failed to draw channels: {MAX_REDRAWS} consecutive degenerate draws")
