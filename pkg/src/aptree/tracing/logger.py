import logging

logger = logging.getLogger("aptree.tracing")
