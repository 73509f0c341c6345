"""Tree annotations for task-oriented dialogue."""
from ._core import (  # noqa: F401
    Error,
    calibrate_delta,
    canonical,
    corpus_stats,
    decode,
    featurize,
    filter_by_threshold,
    lora_forward,
    lora_grad_check,
    parse,
    predict_score,
    render_prompt,
    run_iteration,
    seed_ontology,
    smatch,
    train_svr,
    triples,
    validate,
)

__version__ = "0.1.0"
