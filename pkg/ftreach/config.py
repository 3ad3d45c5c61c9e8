"""Configuration handling for ftreach."""

import json
import logging
import os
from pathlib import Path
from typing import Optional, Tuple

from .errors import InputError

logger = logging.getLogger(__name__)

TREE_STRATEGIES = ("bfs", "dfs", "random")


class Config:
    """Configuration management for ftreach."""

    DEFAULT_CONFIG = {
        "format": "edgelist",
        "tree_strategy": "bfs",
        "seed": 0,
        # largest n for which the CLI re-confirms dominators with the naive oracle
        "naive_limit": 10,
        "brute_force_max_arcs": 20,
        "brute_force_max_n": 9,
        "log_level": "WARNING",
    }

    def __init__(self, config_path: Optional[str] = None):
        self.config = self.DEFAULT_CONFIG.copy()
        self.load_config(config_path)

    def load_config(self, config_path: Optional[str] = None):
        """Load configuration from file."""
        if config_path is None:
            # Look for .ftreach.json in current directory and parent directories
            current_dir = Path.cwd()
            for parent in [current_dir] + list(current_dir.parents):
                potential_config = parent / ".ftreach.json"
                if potential_config.exists():
                    config_path = str(potential_config)
                    break

        if config_path and os.path.exists(config_path):
            try:
                with open(config_path, "r", encoding="utf-8") as f:
                    user_config = json.load(f)
                    if isinstance(user_config, dict):
                        self.config.update(user_config)
                    else:
                        logger.warning(
                            "Config file %s does not contain a valid JSON object",
                            config_path,
                        )
            except (json.JSONDecodeError, IOError, UnicodeDecodeError) as e:
                logger.warning("Could not load config file %s: %s", config_path, e)

    def get(self, key: str, default=None):
        """Get configuration value."""
        return self.config.get(key, default)

    def get_int(self, key: str, default: int) -> int:
        """Get an integer configuration value."""
        value = self.get(key, default)
        try:
            return int(value)
        except (TypeError, ValueError):
            raise InputError(f"config value '{key}' must be an integer, found {value!r}")

    def parse_strategy(self, spec: Optional[str] = None) -> Tuple[str, int]:
        """Parse a tree strategy like 'bfs' or 'random:7' into (name, seed).

        A bare 'random' takes its seed from the configured ``seed``.
        """
        if spec is None or spec == "":
            spec = self.get("tree_strategy", "bfs")

        name, _, seed_part = str(spec).strip().lower().partition(":")
        if name not in TREE_STRATEGIES:
            raise InputError(
                f"unknown tree strategy '{spec}' (expected one of {', '.join(TREE_STRATEGIES)})"
            )

        if seed_part:
            try:
                seed = int(seed_part)
            except ValueError:
                raise InputError(f"invalid seed in tree strategy '{spec}'")
        else:
            seed = self.get_int("seed", 0)

        return name, seed
