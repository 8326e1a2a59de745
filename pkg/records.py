"""
Experiment bookkeeping for entangling perturbations and sweeps.
"""

import os
import tempfile
from datetime import datetime
from pathlib import Path

import pandas as pd

from separability import WitnessReport

CSV_COLUMNS = ['seed', 'epsilon', 'achieved_distance', 'verdict',
               'negativity', 'min_pt_eig', 'input_ball_check']
FLOAT_FORMAT = '%.17g'


class DensityWitnessRecord:
    """Outcome of one entangling perturbation"""

    def __init__(self, input_dims, enlarged_dims, epsilon, achieved_trace_distance,
                 verdict, seed, elapsed, filled_slots=()):
        self.input_dims = tuple(input_dims)
        self.enlarged_dims = tuple(enlarged_dims)
        self.epsilon = float(epsilon)
        self.achieved_trace_distance = float(achieved_trace_distance)
        self.verdict = verdict  # WitnessReport
        self.seed = seed
        self.elapsed = float(elapsed)  # seconds
        self.filled_slots = tuple(filled_slots)

    def to_dict(self):
        """Convert to dictionary for serialization"""
        return {
            'input_dims': list(self.input_dims),
            'enlarged_dims': list(self.enlarged_dims),
            'epsilon': self.epsilon,
            'achieved_trace_distance': self.achieved_trace_distance,
            'verdict': self.verdict.to_dict(),
            'seed': self.seed,
            'elapsed': self.elapsed,
            'filled_slots': list(self.filled_slots),
        }

    @classmethod
    def from_dict(cls, data):
        """Create from dictionary"""
        return cls(
            input_dims=data['input_dims'],
            enlarged_dims=data['enlarged_dims'],
            epsilon=data['epsilon'],
            achieved_trace_distance=data['achieved_trace_distance'],
            verdict=WitnessReport.from_dict(data['verdict']),
            seed=data['seed'],
            elapsed=data['elapsed'],
            filled_slots=data.get('filled_slots', ()),
        )

    def same_outcome(self, other):
        """Equality on everything except elapsed time"""
        mine, theirs = self.to_dict(), other.to_dict()
        mine.pop('elapsed')
        theirs.pop('elapsed')
        return mine == theirs

    def to_row(self, input_ball_check):
        return {
            'seed': self.seed,
            'epsilon': self.epsilon,
            'achieved_distance': self.achieved_trace_distance,
            'verdict': self.verdict.verdict.value,
            'negativity': self.verdict.negativity,
            'min_pt_eig': self.verdict.min_pt_eigenvalue,
            'input_ball_check': bool(input_ball_check),
        }


class SweepResults:
    """Collects sweep rows and writes them as a deterministic CSV"""

    def __init__(self):
        self.rows = []

    def add(self, record, input_ball_check):
        self.rows.append(record.to_row(input_ball_check))

    def extend(self, rows):
        self.rows.extend(rows)

    def to_frame(self):
        """Rows sorted by (seed, epsilon) with the fixed CSV schema"""
        if not self.rows:
            return pd.DataFrame(columns=CSV_COLUMNS)
        df = pd.DataFrame(self.rows, columns=CSV_COLUMNS)
        return df.sort_values(['seed', 'epsilon'], kind='mergesort').reset_index(drop=True)

    def save_csv(self, path, timestamp=True):
        """
        Write the CSV atomically: rows go to a temporary file in the target
        directory, which replaces path only once fully written.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        df = self.to_frame()

        fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        try:
            with os.fdopen(fd, 'w', newline='') as f:
                if timestamp:
                    f.write(f"# generated {datetime.now().isoformat(timespec='seconds')}\n")
                df.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
            os.replace(tmp_name, path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise

        print(f"Sweep saved: {path} ({len(df)} rows)")
        return path
