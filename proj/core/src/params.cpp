/*
 * Copyright 2026 The ORVOS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "orvos/params.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "orvos/errors.hpp"

namespace orvos {

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

Parameter& ParamStore::add(const std::string& name, Matrix init) {
  if (params_.contains(name)) throw ConfigError("parameter already registered: " + name);
  Parameter p;
  p.grad = Matrix(init.rows(), init.cols());
  p.value = std::move(init);
  return params_.emplace(name, std::move(p)).first->second;
}

Parameter& ParamStore::at(std::string_view name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("unknown parameter: " + std::string(name));
  return it->second;
}

const Parameter& ParamStore::at(std::string_view name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("unknown parameter: " + std::string(name));
  return it->second;
}

bool ParamStore::contains(std::string_view name) const { return params_.find(name) != params_.end(); }

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, p] : params_) n += p.value.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [name, p] : params_) {
    p.grad.fill(0.0);
    p.grad_populated = false;
  }
}

void ParamStore::assign_values(const ParamStore& other) {
  if (other.tensor_count() != tensor_count()) {
    throw ShapeError("parameter sets differ: " + std::to_string(other.tensor_count()) +
                     " tensors vs " + std::to_string(tensor_count()));
  }
  for (auto& [name, p] : params_) {
    if (!other.contains(name)) throw ShapeError("missing parameter in source: " + name);
    const Matrix& src = other.at(name).value;
    if (!src.same_shape(p.value)) {
      throw ShapeError("shape mismatch for " + name + ": " + std::to_string(src.rows()) + "x" +
                       std::to_string(src.cols()) + " vs " + std::to_string(p.value.rows()) +
                       "x" + std::to_string(p.value.cols()));
    }
    p.value = src;
  }
}

namespace {

constexpr std::array<char, 4> kMagic = {'O', 'R', 'V', 'S'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) {
    throw FormatError(std::string("checkpoint truncated while reading ") + what);
  }
  return v;
}

}  // namespace

void write_checkpoint(const ParamStore& params, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kCheckpointVersion);
  for (const auto& [name, p] : params) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint32_t>(out, 2);
    put<std::uint64_t>(out, p.value.rows());
    put<std::uint64_t>(out, p.value.cols());
    for (double v : p.value.values()) put<double>(out, v);
  }
  if (!out) throw FormatError("checkpoint write failed");
}

ParamStore read_checkpoint(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != 4 || magic != kMagic) throw FormatError("checkpoint: bad magic bytes");
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  ParamStore store;
  std::string previous;
  while (in.peek() != std::char_traits<char>::eof()) {
    const auto name_len = get<std::uint32_t>(in, "name length");
    if (name_len == 0 || name_len > 4096) throw FormatError("checkpoint: bad name length");
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (in.gcount() != static_cast<std::streamsize>(name_len)) {
      throw FormatError("checkpoint truncated while reading a tensor name");
    }
    if (!previous.empty() && name <= previous) {
      throw FormatError("checkpoint: tensors not in name order at " + name);
    }
    const auto rank = get<std::uint32_t>(in, "rank");
    if (rank < 1 || rank > 2) throw FormatError("checkpoint: unsupported rank for " + name);
    std::uint64_t rows = 1;
    std::uint64_t cols = get<std::uint64_t>(in, "dims");
    if (rank == 2) {
      rows = cols;
      cols = get<std::uint64_t>(in, "dims");
    }
    if (rows * cols > (std::uint64_t{1} << 32)) throw FormatError("checkpoint: tensor too large: " + name);
    Matrix value(rows, cols);
    for (double& v : value.values()) v = get<double>(in, name.c_str());
    store.add(name, std::move(value));
    previous = name;
  }
  return store;
}

void save_checkpoint(const ParamStore& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open checkpoint for writing: " + path.string());
  write_checkpoint(params, out);
}

ParamStore load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint: " + path.string());
  return read_checkpoint(in);
}

}  // namespace orvos
