import re
import unicodedata
import logging
import yaml
import os
from functools import lru_cache

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_LIMIT = 200_000
ORACLE_LIMIT_ENV = "ECLIFT_ORACLE_LIMIT"


def slugify(value: str, allow_unicode=False) -> str:
    """
    Convert spaces or repeated dashes to single dashes. Remove characters that
    aren't alphanumerics, underscores, or hyphens. Convert to lowercase.
    Also strip leading and trailing whitespace, dashes, and underscores.

    Adapted from Django's slugify function; used for output file stems.
    """
    value = str(value)
    if allow_unicode:
        value = unicodedata.normalize('NFKC', value)
        value = re.sub(r'[^\w\s-]', '', value.lower())
    else:
        value = unicodedata.normalize('NFKD', value).encode('ascii', 'ignore').decode('ascii')
        value = re.sub(r'[^\w\s-]', '', value).strip().lower()
    value = re.sub(r'[-\s]+', '-', value)
    value = re.sub(r'^[-\s_]+|[-\s_]+$', '', value)
    logger.debug(f"Slugified to '{value}'")
    return value


# --- Configuration Loading ---

# Assumes utils.py is in src/ and config.yaml is in the root
CONFIG_PATH = os.path.join(os.path.dirname(__file__), '..', 'config.yaml')


@lru_cache(maxsize=None)
def load_config(path: str = CONFIG_PATH) -> dict:
    """Loads the configuration from config.yaml."""
    try:
        with open(path, 'r') as f:
            config = yaml.safe_load(f)
            if config is None:
                raise ValueError(f"Configuration file {path} is empty.")
            logger.info(f"Loaded configuration from {path}")
            return config
    except yaml.YAMLError as e:
        logger.error(f"Error parsing configuration file {path}: {e}")
        raise
    except Exception as e:
        logger.error(f"Error loading configuration file {path}: {e}")
        raise


def config_value(section: str, key: str, default=None):
    """One setting from config.yaml, falling back to ``default`` when absent."""
    return load_config().get(section, {}).get(key, default)


def oracle_limit() -> int:
    """Largest field order the brute-force oracles may scan. ECLIFT_ORACLE_LIMIT wins over config.yaml."""
    raw = os.getenv(ORACLE_LIMIT_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError:
            logger.warning(f"Ignoring non-integer {ORACLE_LIMIT_ENV}={raw!r}")
    return int(config_value('oracle', 'limit', DEFAULT_ORACLE_LIMIT))

# --- End Configuration Loading ---
