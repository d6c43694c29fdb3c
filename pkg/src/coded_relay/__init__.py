"""Two-hop relaying with Reed-Solomon coded generations on a random-walk torus."""

__version__ = "0.1.0"
