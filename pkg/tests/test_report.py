"""Report rendering, grounding, and augmentation-pipeline spec tests."""

import pytest

from driftaudit.audit import AuditResults, AuditRow, worst_cell
from driftaudit.errors import EmptyPipeline, StructureError, VersionError
from driftaudit.metrics import MetricSpec
from driftaudit.orchestrator import RubricBackend, run_analysis_phase
from driftaudit.report import (
    AugmentationPipelineSpec,
    PipelineOp,
    build_augmentation_spec,
    parse_pipeline,
    render_report,
    serialize_pipeline,
)


def fixture_results():
    specs = [MetricSpec("Accuracy"), MetricSpec("BrierScore")]
    rows = [
        AuditRow("BASELINE", None, None, None,
                 values={"Accuracy": 0.98, "BrierScore": 0.0525}),
        AuditRow("BrightnessShift(1.5)", "BrightnessShift", 1.5, 7,
                 values={"Accuracy": 0.88, "BrierScore": 0.091}),
        AuditRow("GaussianNoise(0.3)", "GaussianNoise", 0.3, 8,
                 values={"Accuracy": 0.94, "BrierScore": 0.0702}),
    ]
    return AuditResults(columns=["Accuracy", "BrierScore"], specs=specs, rows=rows,
                        metadata={"seed": 1, "sample_size": 50})


def draft_for(results):
    draft, _ = run_analysis_phase(RubricBackend(), results)
    return draft


class TestRenderReport:
    def test_rubric_draft_leads_with_worst_cell(self):
        results = fixture_results()
        report = render_report(results, draft_for(results))
        worst = worst_cell(results)
        first_bullet = next(
            ln for ln in report.section1_failures_and_strengths.splitlines()
            if ln.startswith("-")
        )
        assert worst.row_label in first_bullet
        assert worst.metric in first_bullet
        assert not report.warnings

    def test_ungrounded_shift_claim_stripped(self):
        results = fixture_results()
        draft = draft_for(results)
        injected = draft.replace(
            "2. Deployment impact",
            "- GaussianBlur(5) halved accuracy in our tests.\n\n2. Deployment impact",
        )
        report = render_report(results, injected)
        assert "GaussianBlur" not in report.section1_failures_and_strengths
        assert any("GaussianBlur" in w for w in report.warnings)

    def test_ungrounded_number_stripped(self):
        results = fixture_results()
        draft = draft_for(results)
        injected = draft.replace(
            "2. Deployment impact",
            "- BrightnessShift(1.5) cut Accuracy to 0.1234.\n\n2. Deployment impact",
        )
        report = render_report(results, injected)
        assert "0.1234" not in report.section1_failures_and_strengths
        assert any("0.1234" in w for w in report.warnings)

    def test_grounded_sections_untouched(self):
        results = fixture_results()
        report = render_report(results, draft_for(results))
        assert "BrightnessShift(1.5)" in report.section1_failures_and_strengths
        rendered = report.to_markdown()
        for heading in ("## 1.", "## 2.", "## 3.", "## 4.", "## Appendix"):
            assert heading in rendered

    def test_missing_section_is_structure_error(self):
        with pytest.raises(StructureError):
            render_report(fixture_results(), "1. only failures\n2. impact\n4. notes")


class TestBuildAugmentationSpec:
    def test_prompt_jpeg_example(self):
        spec = build_augmentation_spec("v2.RandomApply([v2.JPEG(quality=80)], 0.3)")
        assert len(spec.ops) == 1
        op = spec.ops[0]
        assert op.name == "JPEG"
        assert op.params == {"quality": 80}
        assert op.p == pytest.approx(0.3)
        assert op.custom is None

    def test_loose_text_form(self):
        spec = build_augmentation_spec("random-apply JPEG quality 80 at p=0.3")
        op = spec.ops[0]
        assert (op.name, op.params.get("quality"), op.p) == ("JPEG", 80, 0.3)

    def test_random_apply_without_probability_defaults(self):
        spec = build_augmentation_spec("v2.RandomApply([v2.GaussianBlur(kernel_size=5)])")
        assert spec.ops[0].p == pytest.approx(0.3)

    def test_unmapped_op_becomes_custom_stub(self):
        spec = build_augmentation_spec("histogram equalization")
        op = spec.ops[0]
        assert op.custom == "histogram equalization"

    def test_empty_recommendation(self):
        with pytest.raises(EmptyPipeline):
            build_augmentation_spec([])
        with pytest.raises(EmptyPipeline):
            build_augmentation_spec("")

    def test_structured_list_input(self):
        spec = build_augmentation_spec(
            [{"name": "ColorJitter", "params": {"brightness": 0.4}, "p": 0.3},
             {"name": "RandomHorizontalFlip", "p": 0.5}]
        )
        assert [op.name for op in spec.ops] == ["ColorJitter", "RandomHorizontalFlip"]

    def test_compose_block_recursion(self):
        text = (
            "v2.Compose([v2.RandomApply([v2.JPEG(quality=70)], 0.25), "
            "v2.RandomHorizontalFlip(p=0.5)])"
        )
        spec = build_augmentation_spec(text)
        assert [op.name for op in spec.ops] == ["JPEG", "RandomHorizontalFlip"]
        assert spec.ops[0].p == pytest.approx(0.25)


class TestPipelineSerialization:
    def spec(self):
        return AugmentationPipelineSpec(
            ops=[
                PipelineOp("JPEG", {"quality": 80}, 0.3),
                PipelineOp("ColorJitter", {"brightness": 0.4, "hue": 0.1}, 0.3),
                PipelineOp("equalize-histogram", {}, 1.0, custom="equalize-histogram"),
            ]
        )

    def test_round_trip(self):
        spec = self.spec()
        text = serialize_pipeline(spec)
        parsed = parse_pipeline(text)
        assert parsed == spec

    def test_jpeg_example_round_trip(self):
        spec = build_augmentation_spec("v2.RandomApply([v2.JPEG(quality=80)], 0.3)")
        assert parse_pipeline(serialize_pipeline(spec)) == spec

    def test_entry_order_preserved(self):
        text = serialize_pipeline(self.spec())
        parsed = parse_pipeline(text)
        assert [op.name for op in parsed.ops] == [
            "JPEG", "ColorJitter", "equalize-histogram"
        ]

    def test_version_mismatch(self):
        with pytest.raises(VersionError):
            parse_pipeline('{"version": 999, "ops": []}')

    def test_determinism(self):
        first = serialize_pipeline(self.spec())
        second = serialize_pipeline(self.spec())
        assert first == second
