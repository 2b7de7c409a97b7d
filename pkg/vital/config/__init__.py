from .settings import settings
from .run_config import BackendKind, BackendSettings, RetrySettings, RunConfig, build_run_config, load_run_config

__all__ = [
    'settings',
    'BackendKind',
    'BackendSettings',
    'RetrySettings',
    'RunConfig',
    'build_run_config',
    'load_run_config'
]
