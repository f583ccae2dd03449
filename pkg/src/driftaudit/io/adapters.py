"""Model adapters: a uniform predict() surface over toy models, external
model servers, and embedded portable-graph runtimes.

Wire protocol for external servers (JSON, field names fixed):

    request  {"tensors": [<base64 float32 bytes>, ...], "shape": [3, H, W]}
    reply    {"probs": [[...], ...]}

Served either over HTTP POST or as length-delimited JSON on a TCP socket
(4-byte big-endian length prefix), one in-flight request per connection.
"""

from __future__ import annotations

import base64
import json
import socket
import struct
import time
import urllib.parse
from pathlib import Path

import cv2
import numpy as np

from ..errors import AdapterError, ProtocolError
from ..metrics import TaskKind

BATCH_SIZE = 64


class ModelAdapter:
    """Base adapter. Subclasses implement _predict on a uniform batch."""

    task_kind: TaskKind
    num_classes: int
    identity: str
    deterministic: bool = True

    def predict(self, images: list[np.ndarray]) -> np.ndarray:
        raise NotImplementedError


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class ToyBrightnessAdapter(ModelAdapter):
    """Closed-form binary classifier: logit = weight * mean(pixels) + bias.

    With the default weight/bias the decision boundary sits at mean
    brightness 0.5, so audit outcomes are analytically derivable.
    """

    def __init__(self, weight: float = 12.0, bias: float = -6.0):
        self.weight = float(weight)
        self.bias = float(bias)
        self.task_kind = TaskKind.BINARY
        self.num_classes = 2
        self.identity = f"toy:brightness?w={self.weight:g}&b={self.bias:g}"

    def predict(self, images):
        means = np.array([float(img.mean()) for img in images])
        p1 = _sigmoid(self.weight * means + self.bias)
        return np.stack([1.0 - p1, p1], axis=1)


class ToyColorAdapter(ModelAdapter):
    """Closed-form 3-class classifier: logits = scale * per-channel means."""

    def __init__(self, scale: float = 10.0):
        self.scale = float(scale)
        self.task_kind = TaskKind.MULTICLASS
        self.num_classes = 3
        self.identity = f"toy:color?scale={self.scale:g}"

    def predict(self, images):
        feats = np.stack([img.reshape(3, -1).mean(axis=1) for img in images])
        return _softmax(self.scale * feats)


def _encode_batch(images: list[np.ndarray]) -> dict:
    shape = list(images[0].shape)
    tensors = []
    for img in images:
        if list(img.shape) != shape:
            raise AdapterError("server batches require uniform image shapes")
        tensors.append(base64.b64encode(np.ascontiguousarray(img, dtype=np.float32).tobytes()).decode("ascii"))
    return {"tensors": tensors, "shape": shape}


def _decode_probs(payload, n: int) -> np.ndarray:
    if not isinstance(payload, dict) or "probs" not in payload:
        raise ProtocolError("server reply missing 'probs'")
    probs = np.asarray(payload["probs"], dtype=float)
    if probs.ndim != 2 or probs.shape[0] != n:
        raise ProtocolError(f"server returned {probs.shape} probs for {n} inputs")
    return probs


class HttpServerAdapter(ModelAdapter):
    """POSTs prediction batches to an external model server."""

    def __init__(self, url: str, task_kind: TaskKind, num_classes: int,
                 timeout: float = 10.0, retries: int = 2):
        self.url = url
        self.task_kind = task_kind
        self.num_classes = num_classes
        self.timeout = timeout
        self.retries = retries
        self.identity = url

    def predict(self, images):
        import requests

        body = _encode_batch(images)
        last_error = None
        for attempt in range(self.retries + 1):
            try:
                resp = requests.post(self.url, json=body, timeout=self.timeout)
                resp.raise_for_status()
                return _decode_probs(resp.json(), len(images))
            except ProtocolError:
                raise
            except ValueError as exc:  # undecodable JSON body
                raise ProtocolError(f"unparseable server reply: {exc}") from exc
            except Exception as exc:
                last_error = exc
                if attempt < self.retries:
                    time.sleep(0.2 * 2**attempt)
        raise AdapterError(
            f"model server unreachable after {self.retries + 1} attempts: {last_error}",
            retries=self.retries,
        )


class SocketServerAdapter(ModelAdapter):
    """Length-delimited JSON over a local TCP socket."""

    def __init__(self, host: str, port: int, task_kind: TaskKind, num_classes: int,
                 timeout: float = 10.0, retries: int = 2):
        self.host = host
        self.port = port
        self.task_kind = task_kind
        self.num_classes = num_classes
        self.timeout = timeout
        self.retries = retries
        self.identity = f"tcp://{host}:{port}"

    def _round_trip(self, message: bytes) -> bytes:
        with socket.create_connection((self.host, self.port), timeout=self.timeout) as conn:
            conn.sendall(struct.pack(">I", len(message)) + message)
            header = _read_exact(conn, 4)
            (length,) = struct.unpack(">I", header)
            return _read_exact(conn, length)

    def predict(self, images):
        body = json.dumps(_encode_batch(images)).encode("utf-8")
        last_error = None
        for attempt in range(self.retries + 1):
            try:
                raw = self._round_trip(body)
                break
            except OSError as exc:
                last_error = exc
                if attempt < self.retries:
                    time.sleep(0.2 * 2**attempt)
        else:
            raise AdapterError(
                f"model server unreachable after {self.retries + 1} attempts: {last_error}",
                retries=self.retries,
            )
        try:
            payload = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ProtocolError(f"unparseable server reply: {exc}") from exc
        return _decode_probs(payload, len(images))


def _read_exact(conn: socket.socket, n: int) -> bytes:
    chunks = []
    remaining = n
    while remaining:
        chunk = conn.recv(remaining)
        if not chunk:
            raise OSError("connection closed mid-message")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


class OnnxAdapter(ModelAdapter):
    """Embedded portable-graph runtime. Declares its input spec (H, W and
    per-channel normalization) via a sidecar JSON next to the graph file."""

    def __init__(self, graph_path: str | Path, config: dict | None = None):
        graph_path = Path(graph_path)
        if config is None:
            sidecar = graph_path.with_suffix(graph_path.suffix + ".json")
            config = json.loads(sidecar.read_text()) if sidecar.exists() else {}
        try:
            import onnxruntime
        except ImportError as exc:
            raise AdapterError(
                "onnxruntime is not installed; the embedded-graph adapter is unavailable"
            ) from exc
        self._session = onnxruntime.InferenceSession(
            str(graph_path), providers=["CPUExecutionProvider"]
        )
        self.task_kind = TaskKind(config.get("task_kind", "multiclass"))
        self.num_classes = int(config["num_classes"])
        self.input_hw = tuple(config.get("input_hw", ()))
        self.mean = np.asarray(config.get("mean", [0.0, 0.0, 0.0]), dtype=np.float32)
        self.std = np.asarray(config.get("std", [1.0, 1.0, 1.0]), dtype=np.float32)
        self.outputs_logits = config.get("output", "logits") == "logits"
        self.identity = str(graph_path)

    def _prepare(self, img: np.ndarray) -> np.ndarray:
        if self.input_hw:
            hwc = np.moveaxis(img, 0, 2)
            hwc = cv2.resize(hwc, (self.input_hw[1], self.input_hw[0]), interpolation=cv2.INTER_LINEAR)
            img = np.moveaxis(hwc, 2, 0)
        return (img - self.mean[:, None, None]) / self.std[:, None, None]

    def predict(self, images):
        batch = np.stack([self._prepare(img) for img in images]).astype(np.float32)
        input_name = self._session.get_inputs()[0].name
        (raw,) = self._session.run(None, {input_name: batch})
        raw = np.asarray(raw, dtype=float)
        if not self.outputs_logits:
            return raw
        if self.task_kind == TaskKind.MULTILABEL:
            return _sigmoid(raw)
        return _softmax(raw)


def make_adapter(ref: str, task_kind: TaskKind | str = TaskKind.MULTICLASS,
                 num_classes: int = 2) -> ModelAdapter:
    """Build an adapter from a model reference string.

    Recognized forms: toy:brightness[?w=..&b=..], toy:color[?scale=..],
    http(s)://..., tcp://host:port, and paths ending in .onnx.
    """
    task_kind = TaskKind(task_kind)
    if ref.startswith("toy:"):
        name, _, query = ref[4:].partition("?")
        params = dict(urllib.parse.parse_qsl(query))
        if name == "brightness":
            return ToyBrightnessAdapter(
                weight=float(params.get("w", 12.0)), bias=float(params.get("b", -6.0))
            )
        if name == "color":
            return ToyColorAdapter(scale=float(params.get("scale", 10.0)))
        raise AdapterError(f"unknown toy model: {name}")
    if ref.startswith(("http://", "https://")):
        return HttpServerAdapter(ref, task_kind, num_classes)
    if ref.startswith("tcp://"):
        parsed = urllib.parse.urlparse(ref)
        return SocketServerAdapter(parsed.hostname, parsed.port, task_kind, num_classes)
    if ref.endswith(".onnx"):
        return OnnxAdapter(ref)
    raise AdapterError(f"unrecognized model reference: {ref}")


def predict_batch(adapter: ModelAdapter, images: list[np.ndarray]) -> np.ndarray:
    """Run the adapter over images in fixed-size chunks, preserving order."""
    if not images:
        return np.zeros((0, adapter.num_classes))
    outputs = []
    for start in range(0, len(images), BATCH_SIZE):
        outputs.append(np.asarray(adapter.predict(images[start : start + BATCH_SIZE])))
    probs = np.concatenate(outputs, axis=0)
    if probs.shape != (len(images), adapter.num_classes):
        raise ProtocolError(
            f"adapter returned shape {probs.shape}, expected {(len(images), adapter.num_classes)}"
        )
    return probs
