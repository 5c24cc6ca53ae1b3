# Copyright (c) 2026 The heat Authors. All Rights Reserved.
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

"""Multi-core matrix-factorization trainer with cosine contrastive loss."""

from ._heat import (
    CorruptCheckpoint,
    EmptyTestSet,
    InteractionFormat,
    InteractionSet,
    ParseError,
    SamplerKind,
    Similarity,
    TrainingConfig,
    TuneInputs,
    ccl_loss,
    ccl_loss_grad,
    cosine_forward,
    cosine_grad_item,
    cosine_grad_user,
    estimate_speedup,
    evaluate,
    init_matrix,
    load_checkpoint,
    load_interactions,
    load_model,
    make_synthetic,
    run_cli,
    save_checkpoint,
    tile_size_for_cache,
    topk,
    train,
    tune_tiling,
)

__all__ = [name for name in dir() if not name.startswith("_")]
