"""qmonitor core package.

Simulacion de un sistema de dos niveles bajo medida continua de la energia:

- qmonitor.dynamics     → tasas, regimenes, probabilidades, punto excepcional, tiempo de paso
- qmonitor.correlations → estado tripartito, matrices X, concurrencia y correlacion cuantica
- qmonitor.oracles      → integracion ODE, busqueda de raices y discord por optimizacion
- qmonitor.verifier     → comparacion sistematica forma cerrada / oraculo
- qmonitor.sweeps       → barridos de parametros y escritura CSV
- qmonitor.models       → modelos Pydantic compartidos
"""

from __future__ import annotations

__version__ = "1.0.0"

from . import correlations, dynamics, models, oracles, sweeps, verifier  # noqa: E402

__all__ = ["correlations", "dynamics", "models", "oracles", "sweeps", "verifier"]
