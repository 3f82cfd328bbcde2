# Copyright 2026 The mvov3d Authors. All Rights Reserved.
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
# ==============================================================================

"""Training-free open-vocabulary 3D segmentation."""

from mvov3d._mvov3d import (
    DELTA_MATTERPORT3D,
    DELTA_REPLICA,
    DELTA_SCANNET200,
    ConfigError,
    DataError,
    DegenerateInputError,
    Error,
    LoadError,
    LookupError,
    PipelineConfig,
    PipelineError,
    Scene,
    assign_labels,
    compose_region_maps,
    compute_superpoints,
    evaluate,
    generate_synthetic,
    load_scene,
    merge_pixel_features,
    pool_superpoints,
    read_tensor,
    run_pipeline,
    segment_graph,
    select_text,
    write_tensor,
)

__version__ = "0.1.0"
