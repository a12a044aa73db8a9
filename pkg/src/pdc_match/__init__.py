"""Phase-matching and group-velocity-matching maps for mid-infrared photon pairs."""

__version__ = "0.1.0"
