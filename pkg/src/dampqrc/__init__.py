"""Gate-based quantum reservoir computing with ancilla-induced damping."""

__version__ = "0.1.0"
