"""Channel statistics, outage analysis and link optimization for ground-to-HAP FSO links."""

from .scenario import Derived, LinkDesign

__version__ = "0.1.0"

__all__ = ["LinkDesign", "Derived", "__version__"]
