"""neuralgen: a desk-scale seq2seq report generator behind a wire protocol."""

__version__ = "0.1.0"
