"""motionloom: desk-scale humanoid motion authoring pipeline.

Generates per-step motion segments with a toy text-conditioned diffusion
model, guides them along authored floor trajectories, stitches them with
sigmoid temporal smoothing, and scores the result with transition-distance
and spatial-alignment metrics. A small file-backed HTTP service and CLI wrap
the pipeline for the web authoring client.
"""

__version__ = "0.1.0"
