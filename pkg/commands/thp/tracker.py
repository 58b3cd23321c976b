import logging
import threading
from typing import Any, Dict, Hashable, List

from .log import sim_logger_handler

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)


class ResampleTracker:
    """
    resampled-trial tracker
    counts trials that had to be redrawn (rank-deficient channel, codeword collision)
    per cell, safe to update from worker threads
    """

    def __init__(self):
        # cell key -> list of (trial, reason)
        self._events: Dict[Hashable, List[Dict[str, Any]]] = {}
        self._lock = threading.Lock()

    def record(self, key: Hashable, trial: int, reason: str) -> int:
        """
        record one resample

        params:
            key: cell identifier, e.g. ('quantized', B)
            trial: trial index
            reason: short description of why the trial was redrawn

        return:
            number of resamples recorded for the key so far
        """
        with self._lock:
            events = self._events.setdefault(key, [])
            events.append({'trial': trial, 'reason': reason})
            count = len(events)
        logger.debug(f"resampled trial {trial} of cell {key}: {reason}")
        return count

    def count(self, key: Hashable) -> int:
        """resamples recorded for a cell"""
        with self._lock:
            return len(self._events.get(key, []))

    def total(self) -> int:
        with self._lock:
            return sum(len(events) for events in self._events.values())

    def snapshot(self) -> Dict[Hashable, List[Dict[str, Any]]]:
        """copy of all events, sorted by trial within each cell"""
        with self._lock:
            return {key: sorted((dict(e) for e in events), key=lambda e: e['trial'])
                    for key, events in self._events.items()}
