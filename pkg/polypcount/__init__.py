"""
polypcount - polyp counting by temporally-aware tracklet embedding and clustering
"""

__version__ = "1.0.1"
