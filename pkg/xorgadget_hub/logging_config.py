"""
Logging configuration for the gadget compiler.
This module configures the logging settings for the application.
"""

import logging
import sys

from xorgadget_hub.infra.settings import settings

handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
if settings.log_file:
    handlers.append(logging.FileHandler(settings.log_file, encoding='utf-8'))

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.log_level, logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=handlers
)

logger = logging.getLogger("xorgadget_hub")
