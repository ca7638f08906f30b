# Copyright 2026 The sketchbetween Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Keyframe + sketch in-betweening for 2D animation."""

import numpy as np
import torch  # noqa: F401  loads libtorch before the extension

from ._core import (
    Model,
    SketchbetweenError,
    canny_edges,
    decode_animation,
    encode_animation,
    psnr,
    resize_to_canonical,
    run_cli,
    ssim,
    synthesize_sketch,
)

__all__ = [
    "Model",
    "SketchbetweenError",
    "canny_edges",
    "decode_animation",
    "encode_animation",
    "inbetween",
    "psnr",
    "resize_to_canonical",
    "run_cli",
    "ssim",
    "synthesize_sketch",
]


def _as_sketch(image):
    gray = image @ np.array([0.299, 0.587, 0.114], dtype=np.float32)
    return np.repeat(gray[..., None], 3, axis=-1).astype(np.float32)


def inbetween(model, first, sketches, last):
    """Render the in-between frames for one window.

    ``first`` and ``last`` are [H, W, 3] keyframes, ``sketches`` a sequence of
    ``model.window_length - 2`` drawings. Returns the full [N, 128, 128, 3]
    reconstruction, keyframe positions included.
    """
    if len(sketches) != model.window_length - 2:
        raise ValueError(
            f"model expects {model.window_length - 2} sketches, got {len(sketches)}"
        )
    frames = [resize_to_canonical(np.asarray(first, dtype=np.float32))]
    frames += [_as_sketch(resize_to_canonical(np.asarray(s, dtype=np.float32)))
               for s in sketches]
    frames.append(resize_to_canonical(np.asarray(last, dtype=np.float32)))
    return model.predict(np.stack(frames))
