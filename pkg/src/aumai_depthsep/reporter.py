"""Reporters for certificates and experiment reports.

Three reporters are provided:

- :class:`ConsoleReporter`: coloured terminal output.
- :class:`JSONReporter`: machine-readable JSON with sorted keys.
- :class:`CSVReporter`: tables with a versioned header.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from abc import ABC, abstractmethod
from typing import TextIO

from aumai_depthsep.errors import InputError
from aumai_depthsep.models import Certificate, ExperimentReport, LowerBoundCertificate

__all__ = ["Reportable", "BaseReporter", "ConsoleReporter", "JSONReporter", "CSVReporter"]

Reportable = ExperimentReport | Certificate | LowerBoundCertificate

# ---------------------------------------------------------------------------
# ANSI colour helpers (falls back gracefully on non-TTY)
# ---------------------------------------------------------------------------

_RESET = "\033[0m"
_BOLD = "\033[1m"
_GREEN = "\033[32m"
_RED = "\033[31m"
_YELLOW = "\033[33m"
_CYAN = "\033[36m"
_DIM = "\033[2m"


def _supports_color(stream: TextIO) -> bool:
    """Return True when *stream* is a colour-capable TTY."""
    return hasattr(stream, "isatty") and stream.isatty()


def _colour(text: str, code: str, stream: TextIO) -> str:
    if _supports_color(stream):
        return f"{code}{text}{_RESET}"
    return text


def _fmt(value: object) -> str:
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return str(value)
        return f"{value:.6g}"
    return str(value)


# ---------------------------------------------------------------------------
# Abstract base
# ---------------------------------------------------------------------------


class BaseReporter(ABC):
    """Abstract base for all reporters."""

    @abstractmethod
    def report(self, document: Reportable, stream: TextIO | None = None) -> str:
        """Serialise *document* to a string and write it to *stream*.

        Args:
            document: A certificate or an experiment report.
            stream: Optional output stream; defaults to ``sys.stdout``.

        Returns:
            The formatted string representation.
        """


# ---------------------------------------------------------------------------
# Console reporter
# ---------------------------------------------------------------------------


class ConsoleReporter(BaseReporter):
    """Render certificates and tables for a terminal.

    Certificates whose certified error exceeds ε, and lower bounds in the
    vacuous regime, are highlighted.
    """

    def report(self, document: Reportable, stream: TextIO | None = None) -> str:
        out = stream or sys.stdout
        if isinstance(document, ExperimentReport):
            lines = self._format_table(document, out)
        elif isinstance(document, Certificate):
            lines = self._format_certificate(document, out)
        else:
            lines = self._format_lower_bound(document, out)
        output = "\n".join(lines) + "\n"
        out.write(output)
        return output

    def _format_certificate(self, cert: Certificate, stream: TextIO) -> list[str]:
        lines = [_colour(f"Certificate: {cert.pipeline} (eps={_fmt(cert.eps)})", _BOLD, stream)]
        lines.append(_colour("=" * 60, _DIM, stream))
        lines.append(f"  closed form  n={cert.n} m={cert.m} p={cert.p} log2_N={_fmt(cert.log2_N)}")
        lines.append(f"               V={_fmt(cert.V)} log2_B={_fmt(cert.log2_B)}")
        lines.append(
            f"  built        n={cert.n_used} m={cert.m_used} atoms={cert.atoms} units={cert.units}"
        )
        if cert.predicted_error is not None:
            ok = cert.predicted_error <= cert.eps or cert.pipeline == "oscillatory"
            status = _colour("OK", _GREEN, stream) if ok else _colour("ABOVE EPS", _RED, stream)
            lines.append(f"  certified    {_fmt(cert.predicted_error)} [{status}]")
        if cert.measured_error is not None:
            lines.append(f"  measured     {_fmt(cert.measured_error)}")
        for note in cert.notes:
            lines.append(_colour(f"  note: {note}", _YELLOW, stream))
        return lines

    def _format_lower_bound(self, cert: LowerBoundCertificate, stream: TextIO) -> list[str]:
        colour = _GREEN if cert.regime == "ok" else _YELLOW
        return [
            _colour(f"Lower bound: d={cert.d} N={cert.N}", _BOLD, stream),
            f"  kappa^2={_fmt(cert.kappa_sq)} alpha={_fmt(cert.alpha)}",
            f"  error >= {_fmt(cert.lower_bound)} [{_colour(cert.regime, colour, stream)}]",
            *(_colour(f"  note: {note}", _DIM, stream) for note in cert.notes),
        ]

    def _format_table(self, report: ExperimentReport, stream: TextIO) -> list[str]:
        cells = [[_fmt(v) for v in row] for row in report.rows]
        widths = [
            max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(report.columns)
        ]
        lines = [_colour(f"Experiment: {report.name} ({report.experiment})", _BOLD, stream)]
        header = "  ".join(c.rjust(w) for c, w in zip(report.columns, widths, strict=True))
        lines.append(_colour(header, _CYAN, stream))
        lines.append(_colour("-" * (sum(widths) + 2 * max(len(widths) - 1, 0)), _DIM, stream))
        lines.extend(
            "  ".join(v.rjust(w) for v, w in zip(row, widths, strict=True)) for row in cells
        )
        lines.append(_colour(f"{len(cells)} rows, config {report.config_hash[:12]}", _DIM, stream))
        lines.extend(_colour(f"note: {note}", _YELLOW, stream) for note in report.notes)
        return lines


# ---------------------------------------------------------------------------
# JSON reporter
# ---------------------------------------------------------------------------


class JSONReporter(BaseReporter):
    """Serialise to JSON.

    Keys are sorted so that reruns with the same seed are byte-identical;
    the output parses back with ``model_validate_json``.
    """

    def __init__(self, indent: int = 2) -> None:
        self._indent = indent

    def report(self, document: Reportable, stream: TextIO | None = None) -> str:
        out = stream or sys.stdout
        output = json.dumps(document.model_dump(mode="json"), indent=self._indent, sort_keys=True)
        out.write(output + "\n")
        return output


# ---------------------------------------------------------------------------
# CSV reporter
# ---------------------------------------------------------------------------


class CSVReporter(BaseReporter):
    """Tables as CSV with a leading ``schema_version`` column.

    Certificates are written as ``field,value`` pairs.
    """

    def report(self, document: Reportable, stream: TextIO | None = None) -> str:
        out = stream or sys.stdout
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        if isinstance(document, ExperimentReport):
            writer.writerow(["schema_version", *document.columns])
            for row in document.rows:
                if len(row) != len(document.columns):
                    raise InputError(
                        f"row has {len(row)} cells for {len(document.columns)} columns"
                    )
                writer.writerow([document.schema_version, *(_fmt_cell(v) for v in row)])
        else:
            writer.writerow(["field", "value"])
            for key, value in sorted(document.model_dump(mode="json").items()):
                if isinstance(value, dict | list):
                    value = json.dumps(value, sort_keys=True)
                writer.writerow([key, value])
        output = buffer.getvalue()
        out.write(output)
        return output


def _fmt_cell(value: float | int | str) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)
