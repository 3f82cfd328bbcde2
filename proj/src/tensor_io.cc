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

#include "mvov3d/tensor_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <utility>

#include "mvov3d/errors.h"

namespace mvov3d::io {
namespace {

constexpr char kMagic[4] = {'M', 'V', 'O', 'V'};

void PutU32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
  }
}

void PutU64(std::vector<std::byte>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
  }
}

std::uint32_t GetU32(std::span<const std::byte> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
  }
  return v;
}

std::uint64_t GetU64(std::span<const std::byte> bytes, std::size_t offset) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(bytes[offset + i]) << (8 * i);
  }
  return v;
}

template <typename T>
Tensor Make(std::vector<T> values, std::vector<std::uint64_t> dims) {
  Tensor tensor;
  tensor.dims = std::move(dims);
  const std::uint64_t expected = tensor.num_elements();
  if (values.size() != expected) {
    throw ConfigError("tensor holds " + std::to_string(values.size()) +
                      " values but its dims need " + std::to_string(expected));
  }
  tensor.values = std::move(values);
  return tensor;
}

std::string Where(const std::string& source) { return source + ": "; }

}  // namespace

std::size_t DTypeSize(DType dtype) {
  switch (dtype) {
    case DType::kFloat32:
    case DType::kInt32:
      return 4;
    case DType::kUInt8:
      return 1;
  }
  return 0;
}

std::string ToString(DType dtype) {
  switch (dtype) {
    case DType::kFloat32:
      return "float32";
    case DType::kUInt8:
      return "uint8";
    case DType::kInt32:
      return "int32";
  }
  return "unknown";
}

DType Tensor::dtype() const {
  switch (values.index()) {
    case 0:
      return DType::kFloat32;
    case 1:
      return DType::kUInt8;
    default:
      return DType::kInt32;
  }
}

std::uint64_t Tensor::num_elements() const {
  std::uint64_t n = 1;
  for (std::uint64_t d : dims) n *= d;
  return n;
}

Tensor MakeTensor(std::vector<float> values, std::vector<std::uint64_t> dims) {
  return Make(std::move(values), std::move(dims));
}
Tensor MakeTensor(std::vector<std::uint8_t> values,
                  std::vector<std::uint64_t> dims) {
  return Make(std::move(values), std::move(dims));
}
Tensor MakeTensor(std::vector<std::int32_t> values,
                  std::vector<std::uint64_t> dims) {
  return Make(std::move(values), std::move(dims));
}

std::vector<std::byte> EncodeTensor(const Tensor& tensor) {
  if (tensor.dims.size() > kMaxTensorRank) {
    throw ConfigError("tensor rank exceeds " + std::to_string(kMaxTensorRank));
  }
  const std::size_t element = DTypeSize(tensor.dtype());
  std::vector<std::byte> out;
  out.reserve(16 + 8 * tensor.dims.size() + tensor.num_elements() * element);
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  PutU32(out, kTensorVersion);
  PutU32(out, static_cast<std::uint32_t>(tensor.dtype()));
  PutU32(out, static_cast<std::uint32_t>(tensor.dims.size()));
  for (std::uint64_t d : tensor.dims) PutU64(out, d);
  std::visit(
      [&](const auto& values) {
        using T = typename std::decay_t<decltype(values)>::value_type;
        for (T v : values) {
          if constexpr (std::is_same_v<T, std::uint8_t>) {
            out.push_back(static_cast<std::byte>(v));
          } else {
            PutU32(out, std::bit_cast<std::uint32_t>(v));
          }
        }
      },
      tensor.values);
  return out;
}

Tensor DecodeTensor(std::span<const std::byte> bytes,
                    const std::string& source) {
  constexpr std::size_t kFixedHeader = 16;
  if (bytes.size() < kFixedHeader) {
    throw LoadError(Where(source) + "file is " + std::to_string(bytes.size()) +
                    " bytes, shorter than the " +
                    std::to_string(kFixedHeader) + "-byte header");
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw LoadError(Where(source) + "bad magic, expected \"MVOV\"");
  }
  const std::uint32_t version = GetU32(bytes, 4);
  if (version != kTensorVersion) {
    throw LoadError(Where(source) + "unsupported tensor version " +
                    std::to_string(version));
  }
  const std::uint32_t code = GetU32(bytes, 8);
  if (code < 1 || code > 3) {
    throw LoadError(Where(source) + "unknown dtype code " +
                    std::to_string(code));
  }
  const auto dtype = static_cast<DType>(code);
  const std::uint32_t ndim = GetU32(bytes, 12);
  if (ndim > kMaxTensorRank) {
    throw LoadError(Where(source) + "rank " + std::to_string(ndim) +
                    " exceeds " + std::to_string(kMaxTensorRank));
  }
  const std::size_t header = kFixedHeader + 8ull * ndim;
  if (bytes.size() < header) {
    throw LoadError(Where(source) + "file is " + std::to_string(bytes.size()) +
                    " bytes, header needs " + std::to_string(header));
  }
  std::vector<std::uint64_t> dims(ndim);
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < ndim; ++i) {
    dims[i] = GetU64(bytes, kFixedHeader + 8ull * i);
    if (dims[i] != 0 &&
        count > std::numeric_limits<std::uint64_t>::max() / dims[i] /
                    DTypeSize(dtype)) {
      throw LoadError(Where(source) + "dims overflow");
    }
    count *= dims[i];
  }
  const std::uint64_t payload = count * DTypeSize(dtype);
  const std::uint64_t actual = bytes.size() - header;
  if (actual != payload) {
    throw LoadError(Where(source) + "payload is " + std::to_string(actual) +
                    " bytes, expected " + std::to_string(payload) + " for " +
                    ToString(dtype) + " dims");
  }
  const auto body = bytes.subspan(header);
  Tensor tensor;
  tensor.dims = std::move(dims);
  switch (dtype) {
    case DType::kFloat32: {
      std::vector<float> v(count);
      for (std::uint64_t i = 0; i < count; ++i) {
        v[i] = std::bit_cast<float>(GetU32(body, 4 * i));
      }
      tensor.values = std::move(v);
      break;
    }
    case DType::kInt32: {
      std::vector<std::int32_t> v(count);
      for (std::uint64_t i = 0; i < count; ++i) {
        v[i] = std::bit_cast<std::int32_t>(GetU32(body, 4 * i));
      }
      tensor.values = std::move(v);
      break;
    }
    case DType::kUInt8: {
      std::vector<std::uint8_t> v(count);
      for (std::uint64_t i = 0; i < count; ++i) {
        v[i] = static_cast<std::uint8_t>(body[i]);
      }
      tensor.values = std::move(v);
      break;
    }
  }
  return tensor;
}

void WriteTensor(const std::filesystem::path& path, const Tensor& tensor) {
  const auto bytes = EncodeTensor(tensor);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw LoadError(path.string() + ": write failed");
}

Tensor ReadTensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string() + ": cannot open file");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  return DecodeTensor(std::as_bytes(std::span<const char>(raw)),
                      path.string());
}

namespace {

template <typename T>
const std::vector<T>& As(const Tensor& tensor, const std::string& source,
                         DType expected) {
  const auto* values = std::get_if<std::vector<T>>(&tensor.values);
  if (values == nullptr) {
    throw LoadError(Where(source) + "expected " + ToString(expected) +
                    " tensor, found " + ToString(tensor.dtype()));
  }
  return *values;
}

}  // namespace

const std::vector<float>& AsFloat32(const Tensor& tensor,
                                    const std::string& source) {
  return As<float>(tensor, source, DType::kFloat32);
}
const std::vector<std::uint8_t>& AsUInt8(const Tensor& tensor,
                                         const std::string& source) {
  return As<std::uint8_t>(tensor, source, DType::kUInt8);
}
const std::vector<std::int32_t>& AsInt32(const Tensor& tensor,
                                         const std::string& source) {
  return As<std::int32_t>(tensor, source, DType::kInt32);
}

}  // namespace mvov3d::io
