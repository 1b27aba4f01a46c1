from .config import ConfigError, OutputPaths, PipelineConfig, build_config, load_config
from .main import build_parser, main

__all__ = [
    "ConfigError",
    "OutputPaths",
    "PipelineConfig",
    "build_config",
    "load_config",
    "build_parser",
    "main",
]
