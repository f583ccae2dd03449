"""driftaudit: audits image classifiers under simulated distribution shifts.

Subpackages:
    metrics       - metric catalogue, computation, recommendation rubric
    shifts        - 22-kind perturbation catalogue and plan format
    io            - dataset manifests, stratified sampling, model adapters
    orchestrator  - phase dialogues, proposer/critic debate, chat backends
    audit         - the perturbation-evaluation loop and results tables
    report        - report rendering and augmentation-pipeline specs
"""

__version__ = "0.1.0"
