"""Three-lab nested-measurement scenario: states, contexts, frames, dephasing."""

__version__ = "0.1.0"
