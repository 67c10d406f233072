from .default import Config, ConfigLoadError

__all__ = ["Config", "ConfigLoadError"]
