# mapdeg/__init__.py
"""
mapdeg: exact and asymptotic enumeration of rooted maps with prescribed
face valencies, driven by the mobile functional equations.
"""

__version__ = "0.4.0"
