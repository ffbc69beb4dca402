"""Decision-tree toolkit for discourse cue occurrence and placement.

Subpackages:
    corpus      domain records, validation, subset partitioning, datasets
    dataio      corpus files (JSON lines) and names/data dataset files
    induction   gain-ratio tree growing, pessimistic pruning, classification
    evaluation  baselines, cross-validation, confidence intervals, chi-square
    experiment  feature-set search, best-tree selection, corpus synthesis
    cli         command-line front end
"""

__version__ = "0.1.0"
