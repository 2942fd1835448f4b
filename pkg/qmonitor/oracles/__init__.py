"""Numerical oracles for qmonitor closed forms."""

from qmonitor.oracles.discord import DiscordResult, discord_brute_force
from qmonitor.oracles.ode import (
    AmplitudeTrajectory,
    ode_integrate_amplitudes,
    passage_time_root_find,
)

__all__ = [
    "AmplitudeTrajectory",
    "DiscordResult",
    "discord_brute_force",
    "ode_integrate_amplitudes",
    "passage_time_root_find",
]
