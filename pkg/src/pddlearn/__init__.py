"""pddlearn: learns PDDL action semantics by acting in symbolic environments."""

__version__ = "0.1.0"
