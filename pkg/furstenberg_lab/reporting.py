"""
Artifact writing and console summaries.
"""

import csv
import io
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, TextIO, Tuple

from rich import box
from rich.console import Console
from rich.table import Table

from .exceptions import ExportError
from .serialization import dumps

HISTOGRAM_COLUMNS = ("richness", "line_count")


class Reporter:
    """Write JSON artifacts and CSV histograms; print rich summaries."""

    def __init__(self, console: Optional[Console] = None, stream: Optional[TextIO] = None):
        """
        Initialize reporter.

        Args:
            console: Console for summaries (the error stream by default)
            stream: Destination for artifacts without a path (stdout by default)
        """
        self.console = console or Console(stderr=True)
        self.stream = stream

    def export_json(self, data: Dict[str, Any], filepath: Optional[str] = None) -> Optional[str]:
        """
        Write an artifact as deterministic JSON.

        Args:
            data: JSON-native artifact
            filepath: Target file; None writes to the artifact stream

        Returns:
            The path written, or None for the stream

        Raises:
            ExportError: If the file cannot be written
        """
        text = dumps(data)
        if filepath is None:
            (self.stream or sys.stdout).write(text)
            return None
        path = Path(filepath)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
        except OSError as e:
            raise ExportError(f"Cannot write {filepath}: {e}", format="json", filepath=filepath)
        return str(path)

    @staticmethod
    def histogram_csv(histogram: Dict[int, int]) -> str:
        """CSV text with a header row and one row per richness value."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(HISTOGRAM_COLUMNS)
        for richness, count in sorted(histogram.items()):
            writer.writerow([richness, count])
        return buffer.getvalue()

    def export_csv(self, histogram: Dict[int, int], filepath: str) -> str:
        """
        Write a richness histogram as CSV.

        Raises:
            ExportError: If the file cannot be written
        """
        path = Path(filepath)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.histogram_csv(histogram))
        except OSError as e:
            raise ExportError(f"Cannot write {filepath}: {e}", format="csv", filepath=filepath)
        return str(path)

    def print_summary(self, title: str, rows: Iterable[Tuple[str, Any]]):
        """Two-column key/value table."""
        table = Table(title=title, box=box.ROUNDED, show_header=True, header_style="bold magenta")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", justify="right")
        for key, value in rows:
            table.add_row(key, _format_value(value))
        self.console.print(table)

    def print_checks(self, checks: Iterable[Tuple[str, bool]]):
        """Pass/fail table of named checks."""
        table = Table(title="Checks", box=box.ROUNDED, show_header=True, header_style="bold magenta")
        table.add_column("Check", style="cyan")
        table.add_column("Result", justify="center")
        for name, passed in checks:
            table.add_row(name, "[green]pass[/green]" if passed else "[red]FAIL[/red]")
        self.console.print(table)


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "[green]yes[/green]" if value else "[red]no[/red]"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)
