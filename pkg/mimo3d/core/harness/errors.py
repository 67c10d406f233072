# mimo3d/core/harness/errors.py
from pathlib import Path
from typing import Union


class HarnessError(Exception):
    pass


class ComparisonError(HarnessError):
    pass


class EmitError(HarnessError):
    def __init__(self, message: str, path: Union[str, Path]):
        super().__init__(f"{message}: {path}")
        self.path = Path(path)
