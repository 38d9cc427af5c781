import json
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Dict

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def to_jsonable(value: Any, strict: bool = True) -> Any:
    """Plain JSON values; complex numbers become [re, im]. Non-strict mode maps non-finite floats to null"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v, strict) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v, strict) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist(), strict)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            if not strict:
                return None
            raise ValueError(f"Refusing to write non-finite value {value}")
        return value
    return value


def render_json(payload: Any, strict: bool = True) -> str:
    return json.dumps(to_jsonable(payload, strict), sort_keys=True, indent=2, allow_nan=False) + "\n"


def render_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile("w", dir=path.parent, prefix=f".{path.name}.", delete=False)
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, path)
    except BaseException:
        os.unlink(handle.name)
        raise


class Artifacts:
    """
    Output files staged in memory and written only by commit(), so a failed
    command leaves the output directory untouched.
    """

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self._staged: Dict[str, str] = {}

    def json(self, name: str, payload: Any) -> str:
        text = render_json(payload)
        self._staged[name] = text
        return text

    def csv(self, name: str, frame: pd.DataFrame) -> None:
        self._staged[name] = render_csv(frame)

    def text(self, name: str, text: str) -> None:
        """Pre-rendered content, staged as is with a trailing newline"""
        self._staged[name] = text if text.endswith("\n") else text + "\n"

    @property
    def names(self):
        return sorted(self._staged)

    def commit(self) -> None:
        for name in self.names:
            write_atomic(self.out_dir / name, self._staged[name])
            logger.info(f"Wrote {self.out_dir / name}")
