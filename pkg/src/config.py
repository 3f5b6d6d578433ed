import logging
import os
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, model_validator

THREADS_ENV = 'SIMPLEXITY_THREADS'

Subcommand = Literal['enumerate', 'rho', 'bounds', 'lp', 'weights', 'verify']
OutputFormat = Literal['json', 'csv', 'text']

# Subcommands that enumerate simplices and therefore stop at n = 6.
ENUMERATING = ('enumerate', 'rho', 'lp', 'weights')


def default_thread_budget() -> int:
    """
    :return: SIMPLEXITY_THREADS if set, otherwise 1
    :raises ValueError: If the variable is not a positive integer
    """
    raw = os.environ.get(THREADS_ENV, '').strip()
    if not raw:
        return 1
    try:
        threads = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV}='{raw}' is not an integer.")
    if threads < 1:
        raise ValueError(f'{THREADS_ENV} must be at least 1, got {threads}.')
    return threads


class RunConfig(BaseModel):
    subcommand: Subcommand
    n: Optional[int] = None
    input_path: Optional[Path] = None
    output_path: Optional[Path] = None
    classes_path: Optional[Path] = None
    threads: int = 1
    long_running: bool = False
    output_format: OutputFormat = 'text'
    all_checks: bool = False
    axis: Optional[int] = None
    oracle: bool = False
    verbose: bool = False
    quiet: bool = False

    @model_validator(mode='before')
    @classmethod
    def fill_thread_budget(cls, data):
        if isinstance(data, dict) and data.get('threads') is None:
            data = {**data, 'threads': default_thread_budget()}
        return data

    @model_validator(mode='after')
    def validate_ranges(self):
        if self.threads < 1:
            raise ValueError(f'--threads must be at least 1, got {self.threads}.')
        if self.subcommand == 'verify':
            if self.input_path is None:
                raise ValueError('verify needs a dissection file.')
            return self
        if self.n is None:
            raise ValueError(f'{self.subcommand} needs -n.')
        if self.n < 1:
            raise ValueError(f'-n must be at least 1, got {self.n}.')
        if self.subcommand in ENUMERATING:
            if self.n > 6:
                raise ValueError(f'{self.subcommand} supports n up to 6, got {self.n}.')
            if self.n == 6 and not self.long_running:
                raise ValueError(f'{self.subcommand} at n=6 runs for hours; add --long-running.')
        if self.oracle and self.n > 5:
            raise ValueError('The matrix oracle supports n up to 5.')
        return self

    @property
    def log_level(self) -> int:
        if self.verbose:
            return logging.DEBUG
        if self.quiet:
            return logging.WARNING
        return logging.INFO

    @property
    def show_progress(self) -> bool:
        return not self.quiet
