"""Image element extraction adapter.

Turns raw images into the element-descriptor JSON files consumed by the
symmetry analysis engine: region proposals, per-element features with
mirrored variants, class predictions mapped onto the downstream taxonomy,
and half-image features.
"""

__version__ = "0.1.0"
