"""
tube_hardy: numerics for Hardy-Sobolev spaces on tube domains T_Ω = R^d + iΩ.
"""

__version__ = "0.1.0"
