"""Coherence resource theory for incomplete orthonormal bases.

Free-state characterization, incoherent channel classes, trace-distance and
minimal-completion coherence measures, and a four-slit which-path module with
an outer optimizer for the wave-particle trade-off.
"""

__version__ = "0.1.0"
