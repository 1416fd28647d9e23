"""Coverage and rate analysis of mmWave networks that sense and communicate
with the same waveform: an analytic engine and a Monte Carlo simulator."""
from .sysconfig import DerivedParams, SystemConfig, derive, load, validate

__version__ = "0.1.0"
