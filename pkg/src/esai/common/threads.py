"""Worker-count settings read from the environment."""

from __future__ import annotations

import logging
import os

import torch

LOGGER = logging.getLogger(__name__)

THREADS_ENV_VAR = "ESAI_THREADS"


def configured_threads() -> int:
    """Return the ``ESAI_THREADS`` cap, ``0`` meaning "let the runtime decide"."""

    raw = os.getenv(THREADS_ENV_VAR, "0").strip() or "0"
    try:
        value = int(raw)
    except ValueError:
        LOGGER.warning("Ignoring non-integer %s=%r", THREADS_ENV_VAR, raw)
        return 0
    return max(value, 0)


def apply_thread_limit() -> int:
    """Cap torch intra-op parallelism according to ``ESAI_THREADS``."""

    threads = configured_threads()
    if threads > 0:
        torch.set_num_threads(threads)
        LOGGER.debug("Limited torch to %d threads", threads)
    return threads
