/* Copyright 2026 The mvov3d Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef MVOV3D_TENSOR_IO_H_
#define MVOV3D_TENSOR_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mvov3d::io {

// On-disk layout, all multi-byte fields little-endian:
//   bytes 0..3   magic "MVOV"
//   u32          format version (1)
//   u32          dtype code
//   u32          ndim
//   u64 x ndim   dims
//   payload      row-major elements, product(dims) * sizeof(dtype) bytes
inline constexpr std::uint32_t kTensorVersion = 1;
inline constexpr std::uint32_t kMaxTensorRank = 8;

enum class DType : std::uint32_t {
  kFloat32 = 1,
  kUInt8 = 2,
  kInt32 = 3,
};

std::size_t DTypeSize(DType dtype);
std::string ToString(DType dtype);

struct Tensor {
  std::vector<std::uint64_t> dims;
  std::variant<std::vector<float>, std::vector<std::uint8_t>,
               std::vector<std::int32_t>>
      values;

  DType dtype() const;
  std::uint64_t num_elements() const;
};

Tensor MakeTensor(std::vector<float> values, std::vector<std::uint64_t> dims);
Tensor MakeTensor(std::vector<std::uint8_t> values,
                  std::vector<std::uint64_t> dims);
Tensor MakeTensor(std::vector<std::int32_t> values,
                  std::vector<std::uint64_t> dims);

std::vector<std::byte> EncodeTensor(const Tensor& tensor);
// `source` names the origin in error messages. Throws LoadError on any
// header or payload inconsistency.
Tensor DecodeTensor(std::span<const std::byte> bytes,
                    const std::string& source = "<memory>");

void WriteTensor(const std::filesystem::path& path, const Tensor& tensor);
Tensor ReadTensor(const std::filesystem::path& path);

// Typed accessors; throw LoadError naming `source` on a dtype mismatch.
const std::vector<float>& AsFloat32(const Tensor& tensor,
                                    const std::string& source);
const std::vector<std::uint8_t>& AsUInt8(const Tensor& tensor,
                                         const std::string& source);
const std::vector<std::int32_t>& AsInt32(const Tensor& tensor,
                                         const std::string& source);

}  // namespace mvov3d::io

#endif  // MVOV3D_TENSOR_IO_H_
