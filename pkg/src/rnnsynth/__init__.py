"""rnnsynth: train feedforward nets on vector fields and recast them as
continuous-time recurrent networks that replicate the original dynamics."""

__version__ = "0.1.0"
