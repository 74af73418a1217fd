"""Model backends.

Each export kind maps to a backend object with a stable tiny surface:

  - audio backends:      encode(samples, rate, max_frames) -> (T, d) float array
  - text backends:       encode(text, max_tokens)          -> (T, d) float array
  - annotation backends: classify(text)                    -> (emotion, sentiment)

plus a ``model_id`` string (with checkpoint pin) that ends up in the output
file header. export() reduces the (T, d) sequence itself: column mean for the
z-level audio kind, first row (the CLS position) for everything else; the
backend only has to honour the max_frames / max_tokens truncation cap.

The default backends below wrap pretrained checkpoints and are only usable
on a machine that has the model weights. Construction is where all the heavy
imports and weight loading happen; any failure there is reported as
ModelUnavailable. Tests and offline callers pass their own backend object to
export() instead, so nothing in this module is required for the rest of the
repository to run.
"""

from __future__ import annotations

import os
from typing import Protocol

import numpy as np

from .errors import ModelUnavailable
from .spec import ANNOTATION_KIND, KIND_DIMENSIONS

WAV2VEC_CKPT_ENV = "VOICESCREEN_WAV2VEC_CKPT"
SPEECH_ROBERTA_DIR_ENV = "VOICESCREEN_SPEECH_ROBERTA_DIR"


class VectorBackend(Protocol):
    model_id: str

    def encode(self, *args, **kwargs) -> np.ndarray: ...


class AnnotationBackend(Protocol):
    model_id: str

    def classify(self, text: str) -> tuple[str, str]: ...


class Wav2vecZBackend:
    """Convolutional z-level features from a wav2vec-large checkpoint.

    fairseq checkpoints are plain files, so the pin is the local path given
    via the VOICESCREEN_WAV2VEC_CKPT environment variable.
    """

    def __init__(self, checkpoint: str | None = None) -> None:
        checkpoint = checkpoint or os.environ.get(WAV2VEC_CKPT_ENV)
        if not checkpoint:
            raise ModelUnavailable(
                f"wav2vec checkpoint not configured; set {WAV2VEC_CKPT_ENV} "
                "to a local wav2vec_large.pt path"
            )
        if not os.path.exists(checkpoint):
            raise ModelUnavailable(f"wav2vec checkpoint not found: {checkpoint}")
        try:
            import torch
            from fairseq.models.wav2vec import Wav2VecModel
        except ImportError as exc:
            raise ModelUnavailable(f"wav2vec backend needs torch+fairseq: {exc}") from None
        try:
            blob = torch.load(checkpoint, map_location="cpu")
            model = Wav2VecModel.build_model(blob["args"], task=None)
            model.load_state_dict(blob["model"])
            model.eval()
        except Exception as exc:
            raise ModelUnavailable(f"cannot load wav2vec checkpoint: {exc}") from None
        self._torch = torch
        self._model = model
        self.model_id = f"fairseq/wav2vec-large z features ({os.path.basename(checkpoint)})"

    def encode(self, samples: np.ndarray, rate: int, max_frames: int) -> np.ndarray:
        torch = self._torch
        with torch.no_grad():
            wav = torch.from_numpy(np.asarray(samples, dtype=np.float32))[None, :]
            z = self._model.feature_extractor(wav)[0].T  # (T, 512)
        return z[:max_frames].numpy().astype(np.float64)


class SpeechRobertaBackend:
    """CLS embedding of a RoBERTa model trained on discretised speech tokens.

    Needs a local directory holding both the quantiser checkpoint
    (vq_wav2vec.pt) and the trained masked-LM weights, pointed to by
    VOICESCREEN_SPEECH_ROBERTA_DIR. There is no public hub id for this
    pairing, so only a local pin is supported.
    """

    def __init__(self, model_dir: str | None = None) -> None:
        model_dir = model_dir or os.environ.get(SPEECH_ROBERTA_DIR_ENV)
        if not model_dir:
            raise ModelUnavailable(
                f"speech-RoBERTa weights not configured; set {SPEECH_ROBERTA_DIR_ENV}"
            )
        if not os.path.isdir(model_dir):
            raise ModelUnavailable(f"speech-RoBERTa directory not found: {model_dir}")
        quantizer_ckpt = os.path.join(model_dir, "vq_wav2vec.pt")
        if not os.path.exists(quantizer_ckpt):
            raise ModelUnavailable(f"missing quantiser checkpoint: {quantizer_ckpt}")
        try:
            import torch
            from fairseq.models.wav2vec import Wav2VecModel
            from transformers import RobertaModel
        except ImportError as exc:
            raise ModelUnavailable(
                f"speech-RoBERTa backend needs torch+fairseq+transformers: {exc}"
            ) from None
        try:
            blob = torch.load(quantizer_ckpt, map_location="cpu")
            quantizer = Wav2VecModel.build_model(blob["args"], task=None)
            quantizer.load_state_dict(blob["model"])
            quantizer.eval()
            lm = RobertaModel.from_pretrained(model_dir)
            lm.eval()
        except Exception as exc:
            raise ModelUnavailable(f"cannot load speech-RoBERTa weights: {exc}") from None
        self._torch = torch
        self._quantizer = quantizer
        self._lm = lm
        self.model_id = f"speech-roberta-base over vq-wav2vec tokens ({model_dir})"

    def encode(self, samples: np.ndarray, rate: int, max_frames: int) -> np.ndarray:
        torch = self._torch
        with torch.no_grad():
            wav = torch.from_numpy(np.asarray(samples, dtype=np.float32))[None, :]
            z = self._quantizer.feature_extractor(wav)
            _, idx = self._quantizer.vector_quantizer.forward_idx(z)
            tokens = idx[0, :max_frames, 0][None, :]
            hidden = self._lm(input_ids=tokens).last_hidden_state[0]  # (T, 768)
        return hidden.numpy().astype(np.float64)


class SentenceTextBackend:
    """Pooled sentence embedding, returned as a single-row sequence.

    The underlying encoder applies its own token pooling, so the (1, 768)
    row it hands back is what first-row selection in export() keeps.
    """

    model_id = "sentence-transformers/bert-base-nli-mean-tokens"

    def __init__(self) -> None:
        try:
            from sentence_transformers import SentenceTransformer

            self._model = SentenceTransformer(self.model_id)
        except Exception as exc:
            raise ModelUnavailable(f"cannot load {self.model_id}: {exc}") from None

    def encode(self, text: str, max_tokens: int) -> np.ndarray:
        self._model.max_seq_length = max_tokens
        vec = self._model.encode([text], convert_to_numpy=True, show_progress_bar=False)[0]
        return np.asarray(vec, dtype=np.float64)[None, :]


class RobertaClsTextBackend:
    """Token-level hidden states of roberta-large; row 0 is the CLS position."""

    model_id = "FacebookAI/roberta-large"

    def __init__(self) -> None:
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer

            self._tokenizer = AutoTokenizer.from_pretrained(self.model_id)
            self._model = AutoModel.from_pretrained(self.model_id)
            self._model.eval()
            self._torch = torch
        except Exception as exc:
            raise ModelUnavailable(f"cannot load {self.model_id}: {exc}") from None

    def encode(self, text: str, max_tokens: int) -> np.ndarray:
        torch = self._torch
        batch = self._tokenizer(
            text, truncation=True, max_length=max_tokens, return_tensors="pt"
        )
        with torch.no_grad():
            hidden = self._model(**batch).last_hidden_state[0]  # (T, 1024)
        return hidden.numpy().astype(np.float64)


class EmotionSentimentBackend:
    """Emotion + sentiment labels from two text classifiers.

    The emotion head is a T5 fine-tune whose label set includes "surprise";
    the downstream annotation space has five emotion classes, so "surprise"
    is folded into "joy" (both sit on the positive-affect side).
    """

    emotion_model = "mrm8488/t5-base-finetuned-emotion"
    sentiment_model = "distilbert-base-uncased-finetuned-sst-2-english"

    def __init__(self) -> None:
        try:
            from transformers import pipeline

            self._emotion = pipeline("text2text-generation", model=self.emotion_model)
            self._sentiment = pipeline("sentiment-analysis", model=self.sentiment_model)
        except Exception as exc:
            raise ModelUnavailable(f"cannot load annotation models: {exc}") from None
        self.model_id = f"{self.emotion_model} + {self.sentiment_model}"

    def classify(self, text: str) -> tuple[str, str]:
        emotion = self._emotion(text, max_new_tokens=4)[0]["generated_text"].strip().lower()
        if emotion == "surprise":
            emotion = "joy"
        verdict = self._sentiment(text[:512])[0]["label"].lower()
        sentiment = "positive" if verdict.startswith("pos") else "negative"
        return emotion, sentiment


def load_default_backend(kind: str):
    """Construct the pretrained backend for a kind; ModelUnavailable if it can't load."""
    if kind == "wav2vec_z_mean":
        return Wav2vecZBackend()
    if kind == "speech_roberta_cls":
        return SpeechRobertaBackend()
    if kind == "sentence_text":
        return SentenceTextBackend()
    if kind == "roberta_cls_text":
        return RobertaClsTextBackend()
    if kind == ANNOTATION_KIND:
        return EmotionSentimentBackend()
    known = ", ".join((*KIND_DIMENSIONS, ANNOTATION_KIND))
    raise ModelUnavailable(f"no backend for kind {kind!r}; known kinds: {known}")
