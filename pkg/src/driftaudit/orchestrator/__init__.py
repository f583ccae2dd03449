"""Phase dialogues, proposer/critic debate, and chat backends."""

from .backends import (
    CONSENSUS_PHRASE,
    CREDENTIAL_ENV_VAR,
    FINGERPRINT_QUESTIONS,
    PROFILE_QUESTIONS,
    READY_MARKER,
    ChatBackend,
    RemoteBackend,
    RubricBackend,
    ScriptedBackend,
    load_prompt,
    load_shift_rubric,
    make_backend,
    render_analysis_template,
)
from .drivers import (
    CannedDriver,
    DialogueDriver,
    InteractiveDriver,
    ReplayDriver,
    fingerprint_from_answers,
    load_answers_file,
    question_key,
)
from .phases import (
    DeploymentProfile,
    answer_question,
    debate,
    metric_specs_from_payload,
    run_analysis_phase,
    run_metric_phase,
    run_shift_phase,
    split_sections,
)
from .tags import extract_tagged_block, find_tagged_block
from .transcript import (
    AgentMessage,
    DebateTranscript,
    approx_tokens,
    load_transcript,
    save_transcript,
)

__all__ = [
    "AgentMessage",
    "CONSENSUS_PHRASE",
    "CREDENTIAL_ENV_VAR",
    "CannedDriver",
    "ChatBackend",
    "DebateTranscript",
    "DeploymentProfile",
    "DialogueDriver",
    "FINGERPRINT_QUESTIONS",
    "InteractiveDriver",
    "PROFILE_QUESTIONS",
    "READY_MARKER",
    "RemoteBackend",
    "ReplayDriver",
    "RubricBackend",
    "ScriptedBackend",
    "answer_question",
    "approx_tokens",
    "debate",
    "extract_tagged_block",
    "find_tagged_block",
    "fingerprint_from_answers",
    "load_answers_file",
    "load_prompt",
    "load_shift_rubric",
    "load_transcript",
    "make_backend",
    "metric_specs_from_payload",
    "question_key",
    "render_analysis_template",
    "run_analysis_phase",
    "run_metric_phase",
    "run_shift_phase",
    "save_transcript",
    "split_sections",
]
