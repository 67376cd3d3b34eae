"""Budget allocation and latency simulation for crowdsourced task sets."""

from ._hputune import *  # noqa: F401,F403
