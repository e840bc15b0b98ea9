"""Console entry points: one input file in, one image out."""

import argparse
import sys
from typing import Callable, Optional, Sequence

from .figures import plot_convergence, plot_study
from .inputs import PlotInputError


def _run(render: Callable[[str, str], dict], input_meta: str, input_help: str,
         argv: Optional[Sequence[str]]) -> int:
    parser = argparse.ArgumentParser(description=render.__doc__)
    parser.add_argument("input_path", metavar=input_meta, help=input_help)
    parser.add_argument("out_image", help="output raster image path")
    args = parser.parse_args(argv)
    try:
        render(args.input_path, args.out_image)
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main_convergence(argv: Optional[Sequence[str]] = None) -> int:
    return _run(plot_convergence, "traces.csv",
                "trace CSV written by the benchmark harness", argv)


def main_study(argv: Optional[Sequence[str]] = None) -> int:
    return _run(plot_study, "study.json",
                "sweep JSON written by the benchmark harness", argv)
