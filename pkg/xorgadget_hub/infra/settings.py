"""
Settings module for the gadget compiler.
This module implements the Singleton pattern for application settings.
"""

import json
import os
from copy import deepcopy
from fractions import Fraction
from pathlib import Path
from typing import Any

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config.json"

DEFAULT_SETTINGS: dict[str, Any] = {
    "enumeration_var_limit": 30,
    "witness_cap": 64,
    "certify_var_limit": 24,
    "relation_var_limit": 24,
    "naive_xor_width_limit": 10,
    "tree_lemma_width_limit": 12,
    "default_strategy": "1:unit,2:direct,3+:tree",
    "default_seed": 2023,
    "chain_weight": "1",
    "anneal": {"sweeps": 400, "restarts": 4, "t_start": 2.0, "t_end": 0.02},
    "log_level": "INFO",
    "log_file": "xorgadget.log",
}


class SettingsLoader:
    """Singleton class for loading and managing application settings"""

    _instance = None
    _initialized = False

    def __new__(cls, config_file: str | None = None):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self, config_file: str | None = None):
        if not self._initialized:
            self.config_file = config_file or os.getenv("XORGADGET_CONFIG") or str(DEFAULT_CONFIG_PATH)
            self._settings = deepcopy(DEFAULT_SETTINGS)
            self._load_settings()
            self._initialized = True

    def _load_settings(self):
        """Load settings from configuration file"""
        if not os.path.exists(self.config_file):
            return
        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                loaded = json.load(f)
        except (json.JSONDecodeError, IOError) as e:
            # logging is configured from these settings, so it is not available yet
            print(f"Error loading settings: {e}")
            return
        for key, value in loaded.items():
            if isinstance(value, dict) and isinstance(self._settings.get(key), dict):
                self._settings[key].update(value)
            else:
                self._settings[key] = value

    def get(self, key: str, default: Any = None) -> Any:
        """Get setting value by key"""
        return self._settings.get(key, default)

    def set(self, key: str, value: Any):
        """Set setting value"""
        self._settings[key] = value

    def save(self):
        """Save settings to configuration file"""
        try:
            with open(self.config_file, 'w', encoding='utf-8') as f:
                json.dump(self._settings, f, ensure_ascii=False, indent=2)
        except IOError as e:
            print(f"Error saving settings: {e}")

    @property
    def enumeration_var_limit(self) -> int:
        """Largest problem size exhaustive_opt will enumerate"""
        return int(self.get("enumeration_var_limit", 30))

    @property
    def witness_cap(self) -> int:
        return int(self.get("witness_cap", 64))

    @property
    def certify_var_limit(self) -> int:
        """Bound on clause plus auxiliary variables for gadget certification"""
        return int(self.get("certify_var_limit", 24))

    @property
    def relation_var_limit(self) -> int:
        return int(self.get("relation_var_limit", 24))

    @property
    def naive_xor_width_limit(self) -> int:
        return int(self.get("naive_xor_width_limit", 10))

    @property
    def tree_lemma_width_limit(self) -> int:
        return int(self.get("tree_lemma_width_limit", 12))

    @property
    def default_strategy(self) -> str:
        return str(self.get("default_strategy", "1:unit,2:direct,3+:tree"))

    @property
    def default_seed(self) -> int:
        return int(self.get("default_seed", 2023))

    @property
    def chain_weight(self) -> Fraction:
        """Weight of the equality constraints inserted along chains"""
        return Fraction(str(self.get("chain_weight", "1")))

    @property
    def anneal(self) -> dict:
        return dict(self.get("anneal", DEFAULT_SETTINGS["anneal"]))

    @property
    def log_level(self) -> str:
        return str(self.get("log_level", "INFO")).upper()

    @property
    def log_file(self) -> str | None:
        return self.get("log_file")


# Global settings instance
settings = SettingsLoader()
