import csv

import pytest

HEADER = ["run_id", "solver", "dist", "seed", "epoch",
          "grad_evals", "objective", "gap", "wall_ms"]


def write_traces(path, curves, reference=0.5):
    """Write a schema-conforming traces.csv.

    curves: {solver: [(seed, epoch, gap), ...]}
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HEADER)
        if reference is not None:
            w.writerow(["reference", "reference", "-", 0, 0, 0,
                        repr(float(reference)), 0, 0])
        for solver, rows in curves.items():
            for seed, epoch, gap in rows:
                w.writerow([f"{solver}-{seed}", solver, "gaussian", seed,
                            epoch, 100 * epoch, repr(float(gap) + 0.5),
                            repr(float(gap)), 0])


@pytest.fixture
def traces_writer(tmp_path):
    def make(curves, name="traces.csv", reference=0.5):
        path = tmp_path / name
        write_traces(path, curves, reference=reference)
        return str(path)
    return make
