"""whatifsim: answer hypothetical tabletop action questions.

Parse a natural-language action, simulate it with a deterministic rigid-body
engine, decide which objects were affected, and verbalize the per-object
outcomes.
"""

__version__ = "0.1.0"
