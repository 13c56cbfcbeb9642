"""ParityBOT: watch a tweet stream for toxicity aimed at tracked candidates,
answer over-threshold tweets with vetted positive ones, and report on what
the classifier caught and missed."""

__version__ = "0.1.0"
