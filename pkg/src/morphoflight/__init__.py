"""Simulation and control of a transforming aerial-ground robot landing on its wheels."""
from .dynamics import RobotParams
from .errors import MorphoflightError
from .kinematics import LinkageGeometry

__version__ = "0.1.0"

__all__ = ["LinkageGeometry", "MorphoflightError", "RobotParams", "__version__"]
