// Copyright 2026 The NBDT Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nbdt/matrix.hpp"

namespace nbdt {

// NPY v1.0, C order, little endian. Values are widened to double on read.
enum class NpyDtype { f4, f8, i8 };

NpyDtype parse_npy_dtype(const std::string& name);  // "f4" | "f8" | "i8"

struct NpyArray {
  NpyDtype dtype = NpyDtype::f8;
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

NpyArray parse_npy(const std::string& bytes);
std::string encode_npy(const NpyArray& array);

NpyArray read_npy(const std::filesystem::path& path);
void write_npy(const std::filesystem::path& path, const NpyArray& array);

// 2-D arrays only.
Matrix read_matrix(const std::filesystem::path& path);
// f4 output rounds to nearest, ties to even.
void write_matrix(const std::filesystem::path& path, const Matrix& matrix,
                  NpyDtype dtype = NpyDtype::f8);

// 1-D (or single-column) array of integral values.
std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, std::span<const int> labels);

// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace nbdt
