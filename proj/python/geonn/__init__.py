from ._geonn import *  # noqa: F401,F403
