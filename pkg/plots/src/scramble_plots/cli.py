"""plot-phase and plot-slices command-line entry points."""

from __future__ import annotations

import argparse
import sys

from .render import PlotSpec, render_phase_diagram, render_slices
from .sweep_csv import SchemaError

EXIT_OK = 0
EXIT_USAGE = 2


def phase_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-phase", description="(p, tau) heatmap with critical-line overlay"
    )
    parser.add_argument("--sweep", required=True)
    parser.add_argument("--critical", default=None)
    parser.add_argument("--quantity", required=True)
    parser.add_argument("--gamma", type=float, required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--title", default=None)
    try:
        args = parser.parse_args(argv)
        spec = PlotSpec(
            sweep_csv=args.sweep,
            quantity=args.quantity,
            out_path=args.out,
            gamma=args.gamma,
            critical_csv=args.critical,
            title=args.title,
        )
        render_phase_diagram(spec)
        return EXIT_OK
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _parse_fix(raw: str) -> tuple[str, float]:
    if "=" not in raw:
        raise SchemaError(f"--fix expects tau=<value> or p=<value>, got {raw!r}")
    axis, value = raw.split("=", 1)
    axis = axis.strip()
    if axis not in ("tau", "p"):
        raise SchemaError(f"--fix axis must be tau or p, got {axis!r}")
    return axis, float(value)


def slices_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-slices", description="order-parameter slices for several sizes"
    )
    parser.add_argument("--sweep", required=True)
    parser.add_argument("--quantity", required=True)
    parser.add_argument("--gamma", type=float, required=True)
    parser.add_argument("--fix", required=True, help="tau=<value> or p=<value>")
    parser.add_argument("--out", required=True)
    parser.add_argument("--title", default=None)
    try:
        args = parser.parse_args(argv)
        axis, value = _parse_fix(args.fix)
        spec = PlotSpec(
            sweep_csv=args.sweep,
            quantity=args.quantity,
            out_path=args.out,
            gamma=args.gamma,
            fix_axis=axis,
            fix_value=value,
            title=args.title,
        )
        render_slices(spec)
        return EXIT_OK
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def phase_entrypoint() -> None:
    sys.exit(phase_main())


def slices_entrypoint() -> None:
    sys.exit(slices_main())
