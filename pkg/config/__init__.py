import os
from typing import Dict, Optional

from dotenv import load_dotenv
import yaml

DEFAULT_CONFIG_PATH = os.path.join(os.path.dirname(__file__), "config.yaml")


def load_config(config_path: Optional[str] = None) -> Dict:
    """
    Load the project YAML config.

    Args:
        config_path: Path to a YAML file. If None, `ETEA_CONFIG_PATH` is read
            from the environment (after loading `.env`), falling back to the
            bundled `config/config.yaml`

    Returns:
        Dictionary of config values
    """
    load_dotenv()
    path = config_path or os.getenv("ETEA_CONFIG_PATH") or DEFAULT_CONFIG_PATH
    with open(path, "r") as file:
        return yaml.safe_load(file)
