// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dfsq/tensor.hpp"

#include <filesystem>

namespace dfsq {

/// Binary tensor container (see docs/tensor_format.md): magic "DFSQTNSR",
/// version 0x01, dtype 0x01 (float32), rank byte, little-endian u64 dims,
/// raw little-endian payload. Layout is fixed little-endian on every host.
///
/// Non-finite payload values are rejected unless allow_nonfinite is set.
Tensor read_tensor(const std::filesystem::path& path, bool allow_nonfinite = false);

void write_tensor(const Tensor& t, const std::filesystem::path& path);

} // namespace dfsq
