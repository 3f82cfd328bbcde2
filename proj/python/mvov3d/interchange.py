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

"""Pure numpy reader/writer for .mvov tensor files.

Lets an exporter emit scenes without the compiled extension. The layout is
magic "MVOV", then little-endian u32 version, u32 dtype code, u32 rank, one
u64 per dimension, and the row-major payload.
"""

import struct

import numpy as np

MAGIC = b"MVOV"
VERSION = 1
_CODES = {1: np.dtype("<f4"), 2: np.dtype("u1"), 3: np.dtype("<i4")}
_KINDS = {np.dtype("<f4"): 1, np.dtype("u1"): 2, np.dtype("<i4"): 3}


def encode(array):
  array = np.asarray(array)
  if array.dtype.kind == "f":
    array = array.astype("<f4")
  elif array.dtype == np.uint8:
    array = array.astype("u1")
  elif array.dtype.kind in "iub":
    array = array.astype("<i4")
  else:
    raise TypeError(f"unsupported dtype {array.dtype}")
  code = _KINDS[array.dtype]
  header = MAGIC + struct.pack("<III", VERSION, code, array.ndim)
  header += struct.pack(f"<{array.ndim}Q", *array.shape)
  return header + np.ascontiguousarray(array).tobytes()


def decode(data, source="<memory>"):
  if len(data) < 16 or data[:4] != MAGIC:
    raise ValueError(f"{source}: bad magic, expected \"MVOV\"")
  version, code, ndim = struct.unpack_from("<III", data, 4)
  if version != VERSION:
    raise ValueError(f"{source}: unsupported version {version}")
  if code not in _CODES:
    raise ValueError(f"{source}: unknown dtype code {code}")
  offset = 16 + 8 * ndim
  if len(data) < offset:
    raise ValueError(f"{source}: truncated header")
  dims = struct.unpack_from(f"<{ndim}Q", data, 16)
  dtype = _CODES[code]
  expected = int(np.prod(dims, dtype=np.uint64)) * dtype.itemsize
  if len(data) - offset != expected:
    raise ValueError(f"{source}: payload has {len(data) - offset} bytes, "
                     f"expected {expected}")
  return np.frombuffer(data, dtype=dtype, offset=offset).reshape(dims).copy()


def save(path, array):
  with open(path, "wb") as f:
    f.write(encode(array))


def load(path):
  with open(path, "rb") as f:
    return decode(f.read(), str(path))
