"""Unwrapped full-color-space recording: texel-level exposure of a vehicle seen by a pedestrian rig."""
