
import math
import tempfile
import unittest

import numpy as np

from dataclasses import dataclass
from pathlib import Path

from fracplap import json
from fracplap.artifacts import ArtifactDir
from fracplap.artifacts import atomic_write
from fracplap.artifacts import csv_text
from fracplap.artifacts import report_text
from fracplap.space import DomainSpec
from fracplap.space import GridFunction
from fracplap.space import read_grid
from fracplap.space import write_grid


@dataclass
class Row:
    a: float
    b: list


class ArtifactsTest(unittest.TestCase):
    def setUp(self):
        self.testdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.testdir.cleanup)
        self.path = Path(self.testdir.name)

    def testAtomicWrite(self):
        path = atomic_write(self.path / 'sub' / 'report.json', 'text\n')
        self.assertEqual(path.read_text(), 'text\n')
        self.assertEqual([p.name for p in path.parent.iterdir()], ['report.json'])

    def testCsvText(self):
        text = csv_text([{'x': 0.1, 'n': 3, 'ok': True}, {'x': 1 / 3, 'n': None, 'ok': False}],
                        ['x', 'n', 'ok'])
        self.assertEqual(text, f'x,n,ok\n0.1,3,True\n{1 / 3!r},,False\n')
        self.assertEqual(csv_text([]), '\n')

    def testReportText(self):
        text = report_text({'b': np.float64(1.5), 'a': [np.int64(2), math.inf],
                            'flag': np.bool_(True)})
        self.assertEqual(json.loads(text), {'a': [2, 'inf'], 'b': 1.5, 'flag': True})
        self.assertTrue(text.endswith('\n'))
        self.assertLess(text.index('"a"'), text.index('"b"'))

    def testDataclass(self):
        self.assertEqual(json.loads(json.dumps(Row(np.float64(2.0), [math.nan]))),
                         {'a': 2.0, 'b': ['nan']})

    def testArtifactDir(self):
        artifacts = ArtifactDir(self.path / 'run')
        artifacts.write_json('report.json', {'pass': True})
        artifacts.write_csv('rows.csv', [{'k': 1}])
        artifacts.write_text('notes.txt', 'hello\n')
        self.assertEqual(sorted(p.name for p in artifacts.written),
                         ['notes.txt', 'report.json', 'rows.csv'])
        self.assertEqual(json.loads((self.path / 'run' / 'report.json').read_text()),
                         {'pass': True})

    def testDryRun(self):
        artifacts = ArtifactDir(self.path / 'run', dry_run=True)
        self.assertIsNone(artifacts.write_json('report.json', {}))
        self.assertIsNone(artifacts.write_with('u.csv', write_grid, None))
        self.assertFalse((self.path / 'run').exists())
        self.assertTrue(ArtifactDir(None).dry_run)

    def testWriteWith(self):
        u = GridFunction.sample(lambda x: x[:, 0], DomainSpec.interval(-1.0, 1.0), 0.25, 3.0)
        artifacts = ArtifactDir(self.path)
        path = artifacts.write_with('u.csv', write_grid, u)
        np.testing.assert_array_equal(read_grid(path).values, u.values)
