
import csv
import io
import logging
import os
import tempfile

from pathlib import Path

from . import json


LOGGER = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def atomic_write(path, text):
    '''Write text to path through a temporary file in the same directory.'''
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    LOGGER.debug(f'Wrote {path}')
    return path


def report_text(report):
    return json.dumps(report, indent=2, sort_keys=True) + '\n'


def csv_text(rows, fields=None):
    '''Header row, then one line per row; floats as repr, which round-trips.'''
    rows = list(rows)
    fields = list(fields or (rows[0].keys() if rows else []))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(fields)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v
                         for v in (row.get(f) for f in fields)])
    return buf.getvalue()


class ArtifactDir(object):
    '''Output directory of one experiment; nothing is written in dry-run mode.'''
    def __init__(self, location, *, dry_run=False):
        self.location = Path(location).expanduser().resolve() if location else None
        self.dry_run = dry_run or self.location is None
        self.written = []

    def path(self, name):
        return self.location / name if self.location else Path(name)

    def _write(self, name, text):
        if self.dry_run:
            LOGGER.info(f'DRY-RUN: not writing {self.path(name)}')
            return None
        path = atomic_write(self.path(name), text)
        self.written.append(path)
        return path

    def write_json(self, name, report):
        return self._write(name, report_text(report))

    def write_csv(self, name, rows, fields=None):
        return self._write(name, csv_text(rows, fields))

    def write_text(self, name, text):
        return self._write(name, text)

    def write_with(self, name, writer, *args):
        '''writer(path, *args) for writers that do their own atomic writes.'''
        if self.dry_run:
            LOGGER.info(f'DRY-RUN: not writing {self.path(name)}')
            return None
        path = self.path(name)
        writer(path, *args)
        self.written.append(path)
        return path
