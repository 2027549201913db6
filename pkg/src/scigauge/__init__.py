"""Quality signals for science news coverage.

Builds a diffusion graph from postings, articles, and papers, derives
content and context indicators per article, trains a weakly supervised
quality model over outlet reputability tiers, and serves the indicator
panel for assisted human review.
"""

__version__ = "0.1.0"
