"""Dataset manifests, stratified sampling, and model adapters."""

from .adapters import (
    HttpServerAdapter,
    ModelAdapter,
    OnnxAdapter,
    SocketServerAdapter,
    ToyBrightnessAdapter,
    ToyColorAdapter,
    make_adapter,
    predict_batch,
)
from .manifest import (
    Dataset,
    Record,
    load_dataset,
    load_image,
    load_images,
    stratified_sample,
)
from .toydata import make_brightness_dataset, make_color_dataset, make_multilabel_dataset

__all__ = [
    "Dataset",
    "HttpServerAdapter",
    "ModelAdapter",
    "OnnxAdapter",
    "Record",
    "SocketServerAdapter",
    "ToyBrightnessAdapter",
    "ToyColorAdapter",
    "load_dataset",
    "load_image",
    "load_images",
    "make_adapter",
    "make_brightness_dataset",
    "make_color_dataset",
    "make_multilabel_dataset",
    "predict_batch",
    "stratified_sample",
]
