"""pyva - cause-of-death coding for verbal autopsy data"""

from . import _version

__all__ = []

__version__ = _version.get_versions()["version"]
