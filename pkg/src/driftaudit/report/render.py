"""Final audit report: four validated sections plus a grounded appendix.

Grounding is a cheap hallucination guard: every decimal number a failure
claim cites must string-match (at 4 decimal places) a value, delta, or
parameter present in the results table, and every shift kind named must
actually have been audited. Offending lines are stripped with a warning
rather than failing the report.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..audit import AuditResults, degradation_table, results_markdown
from ..errors import EmptyPipeline, StructureError
from ..shifts import catalogue
from .mitigation import AugmentationPipelineSpec, build_augmentation_spec

_SECTION_TITLES = {
    1: "Failure cases and strengths",
    2: "Deployment impact",
    3: "Mitigation transformations",
    4: "Other notes",
}

_DECIMAL_RE = re.compile(r"[-+]?\d+\.\d+")


@dataclass
class Report:
    section1_failures_and_strengths: str
    section2_deployment_impact: str
    section3_mitigation_pipeline: AugmentationPipelineSpec
    section3_text: str
    section4_other_notes: str
    appendix: str
    warnings: list[str] = field(default_factory=list)

    def to_markdown(self) -> str:
        parts = ["# Model audit report", ""]
        for number, body in (
            (1, self.section1_failures_and_strengths),
            (2, self.section2_deployment_impact),
            (3, self.section3_text),
            (4, self.section4_other_notes),
        ):
            parts.append(f"## {number}. {_SECTION_TITLES[number]}")
            parts.append(body)
            parts.append("")
        if self.warnings:
            parts.append("## Warnings")
            parts.extend(f"- {w}" for w in self.warnings)
            parts.append("")
        parts.append("## Appendix")
        parts.append(self.appendix)
        return "\n".join(parts)


def _grounded_numbers(results: AuditResults) -> set[str]:
    allowed = set()
    for row in results.rows:
        for value in row.values.values():
            allowed.add(f"{value:.4f}")
        if row.param is not None and not isinstance(row.param, int):
            allowed.add(repr(float(row.param)))
    for cell in degradation_table(results):
        allowed.add(f"{cell.delta:.4f}")
        allowed.add(f"{cell.delta:+.4f}")
        raw = cell.value - cell.baseline
        allowed.add(f"{raw:.4f}")
        allowed.add(f"{raw:+.4f}")
    return allowed


def _present_kinds(results: AuditResults) -> set[str]:
    return {row.kind for row in results.rows if row.kind}


def _check_section1(section: str, results: AuditResults) -> tuple[str, list[str]]:
    allowed = _grounded_numbers(results)
    present = _present_kinds(results)
    all_kinds = [k.name for k in catalogue()]
    kept, warnings = [], []
    for line in section.splitlines():
        stripped_ok = True
        for kind in all_kinds:
            if re.search(rf"\b{kind}\b", line) and kind not in present:
                warnings.append(
                    f"stripped ungrounded claim naming unaudited shift {kind}: {line.strip()!r}"
                )
                stripped_ok = False
                break
        if stripped_ok:
            for token in _DECIMAL_RE.findall(line):
                if token not in allowed and token.lstrip("+") not in allowed:
                    warnings.append(
                        f"stripped claim citing value {token} absent from the results table: "
                        f"{line.strip()!r}"
                    )
                    stripped_ok = False
                    break
        if stripped_ok:
            kept.append(line)
    return "\n".join(kept).strip(), warnings


def render_report(results: AuditResults, analysis_draft: str,
                  transcript_ref: str = "transcript.jsonl") -> Report:
    """Validate the draft's structure, ground section 1, and assemble the
    report with the results appendix."""
    from ..orchestrator.phases import split_sections

    sections = split_sections(analysis_draft)
    if sections is None:
        raise StructureError(
            "analysis draft must contain the four numbered sections in order"
        )
    section1, warnings = _check_section1(sections[1], results)
    try:
        pipeline = build_augmentation_spec(sections[3])
    except EmptyPipeline:
        pipeline = AugmentationPipelineSpec(ops=[])
        warnings.append("mitigation section contained no recognizable transform")
    appendix = (
        results_markdown(results)
        + f"\n\nFull dialogue transcript: {transcript_ref}\n"
        + "Augmentation pipeline spec: pipeline.spec\n"
    )
    return Report(
        section1_failures_and_strengths=section1,
        section2_deployment_impact=sections[2],
        section3_mitigation_pipeline=pipeline,
        section3_text=sections[3],
        section4_other_notes=sections[4],
        appendix=appendix,
        warnings=warnings,
    )
