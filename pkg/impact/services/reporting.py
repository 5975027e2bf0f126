"""
Report serialization.

This module converts engine results into report schemas and writes them as
CSV (17 significant digits, LF line endings), JSON or aligned text tables.
"""
import csv
import io
from pathlib import Path
from typing import Any, Callable, Iterable, List, Sequence, TextIO, Union

from pydantic import BaseModel

from impact.core.errors import OutputError
from impact.core.geometry import VelocitySplit
from impact.core.laws import ImpactOutcome
from impact.schemas.reports import (
    EventReport,
    ResolveReport,
    SampleReport,
    SplitReport,
    SweepRow,
    TrajectoryReport,
)
from impact.services.simulator import ImpactEvent, Trajectory

# Shortest precision that round-trips every double
CSV_SIGNIFICANT_DIGITS = 17


def format_number(value: float) -> str:
    """Decimal text that round-trips the double exactly."""
    return format(float(value), f".{CSV_SIGNIFICANT_DIGITS}g")


def split_report(split: VelocitySplit) -> SplitReport:
    return SplitReport(
        parallel_B=split.parallel_B.tolist(),
        ortho_B=split.ortho_B.tolist(),
        ortho_S=split.ortho_S.tolist(),
        norm_ortho_B=split.norm_ortho_B,
        norm_ortho_S=split.norm_ortho_S,
    )


def resolve_report(
    model: str,
    coordinates: Sequence[str],
    time: float,
    outcome: ImpactOutcome,
    stick_residual: float,
) -> ResolveReport:
    """Report of a single resolved impact."""
    return ResolveReport(
        model=model,
        law=outcome.law,
        time=time,
        coordinates=list(coordinates),
        branch=outcome.branch.value,
        effective_tangential_factor=outcome.effective_tangential_factor,
        left_velocity=outcome.left_velocity.tolist(),
        impulse=outcome.impulse.tolist(),
        right_velocity=outcome.right_velocity.tolist(),
        delta_energy=outcome.delta_energy,
        stick_residual=stick_residual,
        split=split_report(outcome.split),
    )


def event_report(event: ImpactEvent) -> EventReport:
    return EventReport(
        index=event.index,
        t=event.time,
        branch=event.branch.value,
        delta_energy=event.delta_energy,
        total_energy_before=event.total_energy_before,
        total_energy_after=event.total_energy_after,
        impulse=event.impulse.tolist(),
        pre_qdot=event.pre_qdot.tolist(),
        post_qdot=event.post_qdot.tolist(),
    )


def trajectory_report(model: str, law: str, coordinates: Sequence[str], trajectory: Trajectory) -> TrajectoryReport:
    """Report of a whole simulation run."""
    return TrajectoryReport(
        model=model,
        law=law,
        coordinates=list(coordinates),
        status=trajectory.status.value,
        samples=[SampleReport(t=s.time, q=s.q.tolist(), qdot=s.qdot.tolist()) for s in trajectory.samples],
        events=[event_report(e) for e in trajectory.events],
    )


def samples_header(n: int) -> List[str]:
    return ["t"] + [f"q{i}" for i in range(1, n + 1)] + [f"qd{i}" for i in range(1, n + 1)]


def events_header(n: int) -> List[str]:
    return (
        ["t", "branch", "dE"]
        + [f"I{i}" for i in range(1, n + 1)]
        + [f"pre_qd{i}" for i in range(1, n + 1)]
        + [f"post_qd{i}" for i in range(1, n + 1)]
    )


def sweep_header(n: int, simulate: bool = False) -> List[str]:
    header = ["value", "branch"] + [f"qdR{i}" for i in range(1, n + 1)] + ["dE"]
    if simulate:
        header += ["impacts", "status"]
    return header + ["error"]


def _writer(handle: TextIO) -> Any:
    return csv.writer(handle, lineterminator="\n")


def write_samples_csv(handle: TextIO, trajectory: Trajectory, n: int) -> None:
    writer = _writer(handle)
    writer.writerow(samples_header(n))
    for s in trajectory.samples:
        writer.writerow([format_number(s.time)] + [format_number(v) for v in (*s.q, *s.qdot)])


def write_events_csv(handle: TextIO, trajectory: Trajectory, n: int) -> None:
    writer = _writer(handle)
    writer.writerow(events_header(n))
    for e in trajectory.events:
        writer.writerow(
            [format_number(e.time), e.branch.value, format_number(e.delta_energy)]
            + [format_number(v) for v in (*e.impulse, *e.pre_qdot, *e.post_qdot)]
        )


def write_sweep_csv(handle: TextIO, rows: Iterable[SweepRow], n: int, simulate: bool = False) -> None:
    writer = _writer(handle)
    writer.writerow(sweep_header(n, simulate))
    for row in rows:
        velocity = [format_number(v) for v in row.right_velocity] or [""] * n
        line = [format_number(row.value), row.branch] + velocity
        line.append("" if row.delta_energy is None else format_number(row.delta_energy))
        if simulate:
            line += ["" if row.impacts is None else str(row.impacts), row.status or ""]
        writer.writerow(line + [row.error or ""])


def write_text(path: Union[str, Path], text: str) -> Path:
    """
    Write UTF-8 text with LF line endings, creating parent directories.

    Raises:
        OutputError: On I/O failure
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except OSError as e:
        raise OutputError(f"Cannot write {path}: {e.strerror or e}", data={"path": str(path)})
    return path


def to_json(report: BaseModel) -> str:
    return report.model_dump_json(indent=2) + "\n"


def csv_text(write: Callable[..., None], *args: Any) -> str:
    """Run a CSV writer into a string."""
    buffer = io.StringIO()
    write(buffer, *args)
    return buffer.getvalue()


def render_table(rows: Sequence[Sequence[str]]) -> str:
    """
    Render rows as a left-aligned text table.

    Args:
        rows: Header row followed by data rows

    Returns:
        str: Table text ending in a newline
    """
    if not rows:
        return ""
    widths = [max(len(row[i]) for row in rows if i < len(row)) for i in range(max(len(r) for r in rows))]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def resolve_table(report: ResolveReport) -> str:
    """Aligned text view of a single-impact report."""

    def vector(values: Sequence[float]) -> str:
        return "(" + ", ".join(format(v, ".12g") for v in values) + ")"

    rows = [
        ["quantity", "value"],
        ["model", report.model],
        ["law", report.law],
        ["coordinates", ", ".join(report.coordinates)],
        ["branch", report.branch],
        ["lambda", format(report.effective_tangential_factor, ".12g")],
        ["left velocity", vector(report.left_velocity)],
        ["parallel_B", vector(report.split.parallel_B)],
        ["ortho_B", vector(report.split.ortho_B)],
        ["ortho_S", vector(report.split.ortho_S)],
        ["|ortho_B|", format(report.split.norm_ortho_B, ".12g")],
        ["|ortho_S|", format(report.split.norm_ortho_S, ".12g")],
        ["impulse", vector(report.impulse)],
        ["right velocity", vector(report.right_velocity)],
        ["delta T", format(report.delta_energy, ".12g")],
        ["stick residual", format(report.stick_residual, ".12g")],
    ]
    return render_table(rows)
