"""
Runtime settings read from the environment

Values come from process environment variables, optionally seeded from a
``.env`` file in the working directory.
"""

import os

from dotenv import load_dotenv

from .constants import SAMPLING

# Take environment variables from .env file
load_dotenv()

LOG_LEVEL: str = os.getenv("AMETRIC_LAB_LOG_LEVEL", "INFO").upper()
CHUNK_SIZE: int = max(1, int(os.getenv("AMETRIC_LAB_CHUNK_SIZE", SAMPLING.CHUNK_SIZE)))
