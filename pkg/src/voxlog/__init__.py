"""Behavioural telemetry capture for a simulated multi-agent voxel world."""

__version__ = "0.1.0"

PLUGIN_VERSION = __version__
