"""iconsynth: text-guided vector icon synthesis with an autoregressive
transformer, trained from scratch at desk scale."""

__version__ = "0.1.0"
