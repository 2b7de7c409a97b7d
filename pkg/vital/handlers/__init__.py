from .dataset_commands import dataset_handler
from .run_commands import run_handler
from .selftest_commands import selftest_handler

__all__ = ['dataset_handler', 'run_handler', 'selftest_handler']
