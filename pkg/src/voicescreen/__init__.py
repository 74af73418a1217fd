"""Speech-based anxiety screening: acoustic features, embedding ingestion,
weighted classifiers, and a reproducible experiment harness.

The public surface is organized by stage:

  audio_io       WAV decode/encode, resampling, framing
  synth          ground-truth synthetic voices and labeled corpora
  dsp_features   pitch, jitter/shimmer, HNR, spectral shape, functionals
  dataset        screening-score buckets, weights, stratified splits
  embeddings     JSONL representation files and manifest joins
  learners       L1 logistic regression, RBF SVM, gradient boosting
  metrics        AUROC, ROC/PR curves, thresholded reports
  pipeline       the experiment matrix (five pipelines + random baseline)
  cli            `voicescreen` command-line entry points
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    audio_io,
    dataset,
    dsp_features,
    embeddings,
    errors,
    learners,
    metrics,
    pipeline,
    synth,
)
