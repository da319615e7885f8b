"""Checks and statistics for evaluating chemistry-tuned language models.

Subpackages cover molecule parsing and validity, synthesis-route
heuristics, output-format linting, dataset curation and splitting,
proportion statistics, and a small numpy implementation of low-rank
adaptation.
"""

__version__ = "0.1.0"
