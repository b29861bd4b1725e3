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


#include "nbdt/npy.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>
#include <system_error>

#include "nbdt/error.hpp"

namespace nbdt {

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;

[[noreturn]] void format_error(const std::string& msg) { fail(ErrorKind::format_error, msg); }

std::size_t item_size(NpyDtype d) { return d == NpyDtype::f4 ? 4 : 8; }

const char* descr(NpyDtype d) {
  switch (d) {
    case NpyDtype::f4: return "<f4";
    case NpyDtype::f8: return "<f8";
    case NpyDtype::i8: return "<i8";
  }
  return "";
}

std::string dict_value(const std::string& header, const std::string& key) {
  const std::regex re("'" + key + "'\\s*:\\s*('[^']*'|True|False|\\([^)]*\\))");
  std::smatch m;
  if (!std::regex_search(header, m, re)) format_error("NPY header is missing field '" + key + "'");
  return m[1].str();
}

}  // namespace

NpyDtype parse_npy_dtype(const std::string& name) {
  if (name == "f4") return NpyDtype::f4;
  if (name == "f8") return NpyDtype::f8;
  if (name == "i8") return NpyDtype::i8;
  fail(ErrorKind::invalid_input, "unsupported dtype '" + name + "' (expected f4, f8 or i8)");
}

NpyArray parse_npy(const std::string& bytes) {
  if (bytes.size() < kMagicLen + 4 || bytes.compare(0, kMagicLen, kMagic, kMagicLen) != 0)
    format_error("not an NPY file (bad magic string)");
  const auto major = static_cast<unsigned char>(bytes[6]);
  const auto minor = static_cast<unsigned char>(bytes[7]);
  if (major != 1 || minor != 0)
    format_error("unsupported NPY version " + std::to_string(major) + "." + std::to_string(minor) +
                 " in field 'version' (only 1.0)");
  const std::size_t header_len = static_cast<unsigned char>(bytes[8]) |
                                 (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
  if (bytes.size() < 10 + header_len) format_error("truncated NPY header");
  const std::string header = bytes.substr(10, header_len);

  NpyArray out;
  const std::string d = dict_value(header, "descr");
  if (d == "'<f4'") {
    out.dtype = NpyDtype::f4;
  } else if (d == "'<f8'") {
    out.dtype = NpyDtype::f8;
  } else if (d == "'<i8'") {
    out.dtype = NpyDtype::i8;
  } else {
    format_error("unsupported NPY field 'descr' = " + d + " (expected '<f4', '<f8' or '<i8')");
  }
  if (dict_value(header, "fortran_order") != "False")
    format_error("unsupported NPY field 'fortran_order' = True (only C order)");

  const std::string shape_text = dict_value(header, "shape");
  std::size_t count = 1;
  {
    const std::regex num("\\d+");
    for (auto it = std::sregex_iterator(shape_text.begin(), shape_text.end(), num);
         it != std::sregex_iterator(); ++it) {
      out.shape.push_back(static_cast<std::size_t>(std::stoull(it->str())));
      count *= out.shape.back();
    }
  }

  const std::size_t offset = 10 + header_len;
  const std::size_t need = count * item_size(out.dtype);
  if (bytes.size() - offset < need)
    format_error("truncated NPY payload: expected " + std::to_string(need) + " bytes, found " +
                 std::to_string(bytes.size() - offset));
  out.values.resize(count);
  const char* p = bytes.data() + offset;
  for (std::size_t i = 0; i < count; ++i) {
    switch (out.dtype) {
      case NpyDtype::f4: {
        float v;
        std::memcpy(&v, p + 4 * i, 4);
        out.values[i] = v;
        break;
      }
      case NpyDtype::f8: std::memcpy(&out.values[i], p + 8 * i, 8); break;
      case NpyDtype::i8: {
        std::int64_t v;
        std::memcpy(&v, p + 8 * i, 8);
        out.values[i] = static_cast<double>(v);
        break;
      }
    }
  }
  return out;
}

std::string encode_npy(const NpyArray& array) {
  std::size_t count = 1;
  for (auto s : array.shape) count *= s;
  require(count == array.values.size(), "NPY shape does not match value count");

  std::ostringstream dict;
  dict << "{'descr': '" << descr(array.dtype) << "', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < array.shape.size(); ++i) {
    dict << array.shape[i];
    if (array.shape.size() == 1 || i + 1 < array.shape.size()) dict << ",";
    if (i + 1 < array.shape.size()) dict << " ";
  }
  dict << "), }";
  std::string header = dict.str();
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');

  std::string out(kMagic, kMagicLen);
  out.push_back('\x01');
  out.push_back('\x00');
  out.push_back(static_cast<char>(header.size() & 0xff));
  out.push_back(static_cast<char>((header.size() >> 8) & 0xff));
  out += header;
  const std::size_t base = out.size();
  out.resize(base + count * item_size(array.dtype));
  char* p = out.data() + base;
  for (std::size_t i = 0; i < count; ++i) {
    const double v = array.values[i];
    switch (array.dtype) {
      case NpyDtype::f4: {
        const auto f = static_cast<float>(v);
        std::memcpy(p + 4 * i, &f, 4);
        break;
      }
      case NpyDtype::f8: std::memcpy(p + 8 * i, &v, 8); break;
      case NpyDtype::i8: {
        require(std::isfinite(v) && v == std::nearbyint(v), "non-integral value for i8 array");
        const auto n = static_cast<std::int64_t>(v);
        std::memcpy(p + 8 * i, &n, 8);
        break;
      }
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io_error, "cannot write '" + path.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(ErrorKind::io_error, "write failed for '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::io_error, "cannot rename into '" + path.string() + "'");
  }
}

NpyArray read_npy(const std::filesystem::path& path) {
  try {
    return parse_npy(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::format_error)
      throw Error(ErrorKind::format_error, path.string() + ": " + e.what());
    throw;
  }
}

void write_npy(const std::filesystem::path& path, const NpyArray& array) {
  write_file_atomic(path, encode_npy(array));
}

Matrix read_matrix(const std::filesystem::path& path) {
  NpyArray a = read_npy(path);
  if (a.shape.size() != 2)
    fail(ErrorKind::format_error, path.string() + ": expected a 2-D array, got " +
                                      std::to_string(a.shape.size()) + " dimensions");
  return Matrix(a.shape[0], a.shape[1], std::move(a.values));
}

void write_matrix(const std::filesystem::path& path, const Matrix& matrix, NpyDtype dtype) {
  write_npy(path, NpyArray{dtype, {matrix.rows(), matrix.cols()}, matrix.data()});
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  const NpyArray a = read_npy(path);
  const bool column = a.shape.size() == 2 && a.shape[1] == 1;
  if (a.shape.size() != 1 && !column)
    fail(ErrorKind::format_error, path.string() + ": labels must be a 1-D array");
  std::vector<int> out;
  out.reserve(a.values.size());
  for (double v : a.values) {
    if (!std::isfinite(v) || v != std::nearbyint(v))
      fail(ErrorKind::format_error, path.string() + ": non-integral label value");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void write_labels(const std::filesystem::path& path, std::span<const int> labels) {
  write_npy(path, NpyArray{NpyDtype::i8, {labels.size()}, {labels.begin(), labels.end()}});
}

}  // namespace nbdt
