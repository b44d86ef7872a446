"""
Verification Run Report Generator.

Generates a markdown report from oracle verdicts.
"""

from datetime import datetime
from pathlib import Path
from typing import Iterable, Optional

from loguru import logger


def generate_run_report(
    verdicts: Iterable,
    output_path: Path,
    seed: Optional[int] = None,
) -> Path:
    """
    Generate a markdown verification report.

    Args:
        verdicts: Verdict objects (one per suite).
        output_path: Path to write the report.
        seed: Master seed of the run.

    Returns:
        Path to the generated report.
    """
    log = logger.bind(component="RunReport")
    verdicts = list(verdicts)

    lines = []
    lines.append("# Verification Report")
    lines.append(f"\n**Generated:** {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    if seed is not None:
        lines.append(f"\n**Seed:** {seed}")
    lines.append("")

    lines.append("---")
    lines.append("\n## Suites")
    lines.append("")
    lines.append("| Suite | Instances | Passed | Skipped | Failed | Status |")
    lines.append("|-------|-----------|--------|---------|--------|--------|")
    for verdict in verdicts:
        status = "✓" if verdict.ok else "✗"
        lines.append(
            f"| {verdict.suite} | {verdict.instances:,} | {verdict.passed:,} | "
            f"{verdict.skipped:,} | {verdict.failed:,} | {status} |"
        )
    lines.append("")

    for verdict in verdicts:
        if not verdict.details and verdict.first_failure is None:
            continue
        lines.append(f"\n### {verdict.suite}")
        lines.append("")
        if verdict.skipped:
            rate = verdict.skipped / verdict.instances
            lines.append(f"- Skipped instances: {verdict.skipped:,} ({rate:.1%}); hypothesis not met")
        for key, value in verdict.details.items():
            if isinstance(value, dict):
                lines.append(f"- **{key}**:")
                for inner, v in value.items():
                    lines.append(f"  - {inner}: {_fmt(v)}")
            else:
                lines.append(f"- **{key}**: {_fmt(value)}")
        if verdict.first_failure is not None:
            lines.append(f"- **First failure**: {verdict.first_failure.get('message', '')}")
            instance = verdict.first_failure.get("instance")
            if instance:
                lines.append(f"  - instance: `{instance}`")
        lines.append("")

    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text("\n".join(lines))
    log.info(f"Run report written: {output_path}")
    return output_path


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)
