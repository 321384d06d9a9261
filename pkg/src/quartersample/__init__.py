"""Non-regular 1/4-sampling masks, masked sensor simulation and reconstruction."""

__version__ = "0.1.0"
