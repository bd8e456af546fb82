"""Which channel reports a news event first: seeding, provider pulls, X
publish-time recovery, on-topic verification and result tables."""

from .model import Event, Mention, PairedDelta, Surface, Verification
from .xrecover import decode_snowflake

__all__ = ["Event", "Mention", "PairedDelta", "Surface", "Verification", "decode_snowflake"]
__version__ = "0.1.0"
