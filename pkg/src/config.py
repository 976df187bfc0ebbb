#!/usr/bin/env python3
"""
Configuration Management for the capillary droplet toolkit
Centralized defaults, optional config.json and environment overrides
"""

import os
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional

PROJECT_ROOT = Path(__file__).parent.parent.absolute()

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


class Config:
    """Centralized configuration management."""

    def __init__(self, config_file: str = "config.json"):
        """Initialize configuration."""
        # Relative names are resolved against the project root
        if not Path(config_file).is_absolute():
            self.config_file = PROJECT_ROOT / config_file
        else:
            self.config_file = Path(config_file)
        self.config_data = {}
        self.load_config()

    @staticmethod
    def defaults() -> Dict:
        """Default configuration tree."""
        return {
            "processing": {
                "threads": 0,  # 0 means all cores
                "resonance_chunk": 2000,
                "divisor_chunk": 16
            },
            "resonance": {
                "b2_sign": "verbatim",  # "verbatim" or "conjugate"
                "divisor_exponent": 4.5,
                "near_zero_threshold": 1e-6,
                "exact_bits": 80
            },
            "elliptic": {
                "c_max": 50,
                "x_bound": 1000000,
                "scan_chunk": 250000
            },
            "sphere": {
                "linf_refinement": 4
            },
            "evolution": {
                "time_oversampling": 32,
                "decompose_tolerance": 1e-12
            },
            "logging": {
                "level": "INFO",
                "file": ""
            },
            "output": {
                "format": "json",
                "indent": 2
            }
        }

    def load_config(self):
        """Load configuration from file or environment variables."""
        defaults = self.defaults()

        if self.config_file.exists():
            try:
                with open(self.config_file, 'r', encoding='utf-8') as f:
                    file_config = json.load(f)
                self.config_data = _merge(defaults, file_config)
            except (json.JSONDecodeError, IOError) as e:
                logging.getLogger(__name__).warning(f"Error loading config file {self.config_file}: {e}")
                self.config_data = defaults
        else:
            self.config_data = defaults

        self._load_from_environment()

    def _load_from_environment(self):
        """Apply CAPWAVES_* environment overrides."""
        env_mappings = {
            "CAPWAVES_THREADS": ["processing", "threads"],
            "CAPWAVES_LOG_LEVEL": ["logging", "level"],
            "CAPWAVES_LOG_FILE": ["logging", "file"],
            "CAPWAVES_B2_SIGN": ["resonance", "b2_sign"],
        }

        for env_var, config_path in env_mappings.items():
            value = os.getenv(env_var)
            if value:
                current = self.get(*config_path)
                self._set_nested_value(config_path, _coerce(value, current))

    def _set_nested_value(self, path: List[str], value):
        """Set a nested configuration value."""
        current = self.config_data
        for key in path[:-1]:
            if key not in current:
                current[key] = {}
            current = current[key]
        current[path[-1]] = value

    def get(self, *path, default=None):
        """Get a configuration value by key path."""
        current = self.config_data
        try:
            for key in path:
                current = current[key]
            return current
        except (KeyError, TypeError):
            return default

    def set(self, *path, value):
        """Set a configuration value by key path."""
        self._set_nested_value(list(path), value)

    def thread_count(self, override: Optional[int] = None) -> int:
        """Resolve the worker count; 0 or None means all cores."""
        threads = override if override is not None else self.get("processing", "threads", default=0)
        threads = int(threads or 0)
        if threads <= 0:
            threads = os.cpu_count() or 1
        return threads

    def save_config(self):
        """Save configuration to file."""
        try:
            with open(self.config_file, 'w', encoding='utf-8') as f:
                json.dump(self.config_data, f, indent=2, ensure_ascii=False)
            logging.getLogger(__name__).info(f"Configuration saved to {self.config_file}")
        except IOError as e:
            logging.getLogger(__name__).error(f"Error saving config: {e}")

    def create_sample_config(self) -> Path:
        """Create a sample configuration file next to config.json."""
        sample_path = self.config_file.parent / "config.sample.json"
        with open(sample_path, 'w', encoding='utf-8') as f:
            json.dump(self.defaults(), f, indent=2, ensure_ascii=False)
        return sample_path


def _merge(base: Dict, override: Dict) -> Dict:
    """Recursive dict merge; override wins on leaves."""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _coerce(raw: str, current):
    """Convert an environment string to the type of the value it replaces."""
    if isinstance(current, bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(current, int):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    return raw


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None):
    """Configure console (stderr) and optional file logging."""
    log_config = config.get("logging", default={})
    level_name = (level or log_config.get("level", "INFO")).upper()
    log_level = getattr(logging, level_name, logging.INFO)
    target = log_config.get("file", "") if log_file is None else log_file

    handlers = [logging.StreamHandler()]
    if target:
        handlers.append(logging.FileHandler(target, encoding='utf-8'))

    logging.basicConfig(level=log_level, format=LOG_FORMAT, handlers=handlers, force=True)


# Create global config instance
config = Config()
