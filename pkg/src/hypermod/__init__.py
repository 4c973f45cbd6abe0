"""hypermod: human-in-the-loop moderation and culture analytics for
pseudonymous gaming communities."""

__version__ = "0.1.0"
