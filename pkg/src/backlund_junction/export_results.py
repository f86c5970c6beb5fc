"""
EXPORT RESULTS - JSON documents, CSV tables and an optional Excel workbook
Every file is written to a temporary sibling first and renamed into place.
"""
import json
import logging
import os
import platform
import sys
import tempfile
from contextlib import contextmanager
from datetime import datetime, timezone

import numpy as np
import pandas as pd

from backlund_junction.config import CSV_FLOAT_FORMAT

logger = logging.getLogger(__name__)

# Excel caps sheet names at 31 characters
SHEET_NAME_LIMIT = 31


@contextmanager
def atomic_path(path):
    """Yield a temporary path next to `path`; it replaces `path` only if the block succeeds"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    suffix = os.path.splitext(path)[1]
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.tmp-', suffix=suffix)
    os.close(fd)
    try:
        yield tmp
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _to_builtin(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, pd.DataFrame):
        return value.to_dict(orient='list')
    if hasattr(value, 'as_dict'):
        return value.as_dict()
    raise TypeError(f'cannot serialize {type(value).__name__}')


def dumps(doc):
    """Deterministic JSON text: sorted keys, fixed separators, full float precision"""
    return json.dumps(doc, sort_keys=True, indent=2, separators=(',', ': '), default=_to_builtin) + '\n'


def write_json(doc, path):
    text = dumps(doc)
    with atomic_path(path) as tmp:
        with open(tmp, 'w', encoding='utf-8') as fh:
            fh.write(text)
    logger.info(f'wrote {path}')
    return path


def read_json(path):
    with open(path, encoding='utf-8') as fh:
        return json.load(fh)


def run_metadata(argv=None):
    """Timestamp and environment of a run; stored apart from the result payload"""
    return {
        'created_utc': datetime.now(timezone.utc).isoformat(timespec='seconds'),
        'argv': list(sys.argv if argv is None else argv),
        'python': platform.python_version(),
        'numpy': np.__version__,
        'pandas': pd.__version__,
    }


def metadata_path(path):
    stem, _ = os.path.splitext(path)
    return f'{stem}.meta.json'


def write_result(doc, path, argv=None):
    """Write the payload to `path` and the run metadata to `<stem>.meta.json`"""
    write_json(doc, path)
    write_json(run_metadata(argv), metadata_path(path))
    return path


def write_csv(frame, path):
    with atomic_path(path) as tmp:
        frame.to_csv(tmp, index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info(f'wrote {path} ({len(frame)} rows)')
    return path


def write_workbook(frames, path):
    """One sheet per table; sheet names are truncated to the Excel limit"""
    with atomic_path(path) as tmp:
        with pd.ExcelWriter(tmp, engine='openpyxl') as writer:
            for name, frame in frames.items():
                frame.to_excel(writer, index=False, sheet_name=str(name)[:SHEET_NAME_LIMIT])
    logger.info(f'wrote {path} ({len(frames)} sheets)')
    return path


def export_tables(frames, out_dir, xlsx=None):
    """Write every frame as `<name>.csv` under out_dir; optionally also a combined workbook"""
    os.makedirs(out_dir, exist_ok=True)
    paths = [write_csv(frame, os.path.join(out_dir, f'{name}.csv')) for name, frame in frames.items()]
    if xlsx:
        paths.append(write_workbook(frames, xlsx))
    return paths
