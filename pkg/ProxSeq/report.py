# License: BSD 3 clause
"""
Report documents written by the command line tools: JSON with sorted keys
and CSV tables with 17 significant digits.
"""
import json
import datetime
import pandas as pd
from petsc4py import PETSc
import mpi4py.MPI as mpi

from .verdict import Verdict, PASS, FAIL, INCONCLUSIVE, jsonable

__version__ = '0.1'


class ReportSettings(object):
    def __init__(self):
        """
        PETSc.Options
        =============

        out : String
            Default is ''.
            Path of the JSON report; nothing is written when empty.

        csv : String
            Default is ''.
            Path of the CSV table of the command.

        no_timestamp : Bool
            Default is False.
            Leave the timestamp out so that identical runs give identical
            files.

        report_indent : Int
            Default is 2.

        report_verbose : Bool
            Default is False.

        """
        OptDB = PETSc.Options()
        self.out = OptDB.getString('out', '')
        self.csv = OptDB.getString('csv', '')
        self.no_timestamp = OptDB.getBool('no_timestamp', False)
        self.indent = OptDB.getInt('report_indent', 2)
        self.verbose = OptDB.getBool('report_verbose', False)


class ReportDocument(object):
    """
    Inputs, check results and provenance of one command.

    Parameters
    ==========

    command : str
        analyze, construct, admit, riesz or suite.

    inputs : dict
        Family and order specifications as json.

    """
    def __init__(self, command, inputs=None, settings=None):
        self.settings = settings if settings is not None else ReportSettings()
        self.command = command
        self.version = __version__
        self.inputs = inputs if inputs is not None else {}
        self.checks = []
        self.results = {}
        self.provenance = {}
        self.tables = {}
        self.timestamp = None if self.settings.no_timestamp else \
            datetime.datetime.now(datetime.timezone.utc).isoformat()

    def add(self, verdict):
        self.checks.append(verdict)
        return verdict

    def add_result(self, name, value):
        """Witness data (envelopes, reports) stored next to the verdicts."""
        self.results[name] = jsonable(value)

    def add_table(self, name, table):
        self.tables[name] = table

    @property
    def status(self):
        return Verdict.combine(self.command, self.checks).status

    @property
    def counts(self):
        out = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0}
        for v in self.checks:
            out[v.status] += 1
        return out

    def to_json(self):
        out = {'version': self.version,
               'command': self.command,
               'inputs': self.inputs,
               'checks': [v.to_json() for v in self.checks],
               'results': self.results,
               'provenance': self.provenance,
               'status': self.status}
        if self.timestamp is not None:
            out['timestamp'] = self.timestamp
        return jsonable(out)

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, indent=self.settings.indent) + '\n'

    def write(self, path=None):
        path = path or self.settings.out
        if not path or mpi.COMM_WORLD.rank != 0:
            return
        with open(path, 'w') as f:
            f.write(self.dumps())
        if self.settings.verbose:
            PETSc.Sys.Print(f'report written to {path}', comm=mpi.COMM_SELF)

    def write_csv(self, name=None, path=None):
        path = path or self.settings.csv
        if not path or not self.tables or mpi.COMM_WORLD.rank != 0:
            return
        table = self.tables[name] if name is not None else next(iter(self.tables.values()))
        write_csv(table, path)

    def view(self):
        if mpi.COMM_WORLD.rank == 0:
            PETSc.Sys.Print(f'proxseq {self.version} {self.command} {self.inputs}',
                            comm=mpi.COMM_SELF)
            for v in self.checks:
                v.view()
            c = self.counts
            PETSc.Sys.Print(f'{c[PASS]} pass, {c[FAIL]} fail, {c[INCONCLUSIVE]} inconclusive',
                            comm=mpi.COMM_SELF)


def write_csv(table, path):
    """Write a DataFrame with a header row and 17 significant digits."""
    if not isinstance(table, pd.DataFrame):
        table = pd.DataFrame(table)
    table.to_csv(path, index=False, float_format='%.17g')
