// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <vector>

#include "tddnet/mlp.hpp"

namespace tddnet {

namespace {

constexpr char kMagic[4] = {'T', 'D', 'D', 'N'};
constexpr std::uint16_t kFormatVersion = 1;

void put_bytes(std::vector<unsigned char>& buf, const void* p, std::size_t n) {
  const auto* b = static_cast<const unsigned char*>(p);
  buf.insert(buf.end(), b, b + n);
}

template <typename T>
void put(std::vector<unsigned char>& buf, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  put_bytes(buf, &v, sizeof(T));  // little-endian host assumed
}

class Reader {
 public:
  Reader(const unsigned char* data, std::size_t size, std::string path)
      : data_(data), size_(size), path_(std::move(path)) {}

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    if (pos_ + sizeof(T) > size_) {
      throw std::runtime_error("model file truncated: " + path_);
    }
    T v;
    std::memcpy(&v, data_ + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  void get_floats(float* dst, std::size_t count) {
    get_bytes(dst, count * sizeof(float));
  }

  void get_bytes(void* dst, std::size_t bytes) {
    if (pos_ + bytes > size_) {
      throw std::runtime_error("model file truncated: " + path_);
    }
    std::memcpy(dst, data_ + pos_, bytes);
    pos_ += bytes;
  }

  std::size_t pos() const { return pos_; }

 private:
  const unsigned char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
  std::string path_;
};

}  // namespace

void save_model(const MlpModel& model, const std::string& path) {
  model.spec.validate();
  std::vector<unsigned char> buf;
  put_bytes(buf, kMagic, sizeof(kMagic));
  put<std::uint16_t>(buf, kFormatVersion);
  put<std::uint16_t>(buf, static_cast<std::uint16_t>(model.weights.size()));
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(model.weights[l].cols()));
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(model.weights[l].rows()));
    put<std::uint8_t>(buf, static_cast<std::uint8_t>(model.spec.activations[l]));
  }
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    const auto& w = model.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {       // row-major on disk
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        put<float>(buf, w(r, c));
      }
    }
    const auto& b = model.biases[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) put<float>(buf, b(i));
  }
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, buf.data(), static_cast<uInt>(buf.size())));
  put<std::uint32_t>(buf, crc);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("model write failed: " + path);
}

MlpModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  const std::streamoff size = in.tellg();
  if (size < static_cast<std::streamoff>(sizeof(kMagic) + 2 * sizeof(std::uint16_t) +
                                         sizeof(std::uint32_t))) {
    throw std::runtime_error("model file truncated: " + path);
  }
  std::vector<unsigned char> buf(static_cast<std::size_t>(size));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(buf.data()), size);
  if (!in) throw std::runtime_error("model read failed: " + path);

  const std::size_t payload = buf.size() - sizeof(std::uint32_t);
  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, buf.data() + payload, sizeof(stored_crc));
  const auto actual_crc = static_cast<std::uint32_t>(
      crc32(0L, buf.data(), static_cast<uInt>(payload)));
  if (stored_crc != actual_crc) {
    throw std::runtime_error("model file CRC mismatch: " + path);
  }

  Reader rd(buf.data(), payload, path);
  char magic[4];
  rd.get_bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a model file (bad magic): " + path);
  }
  const auto version = rd.get<std::uint16_t>();
  if (version != kFormatVersion) {
    throw std::runtime_error("unsupported model format version " +
                             std::to_string(version) + ": " + path);
  }
  const auto n_layers = rd.get<std::uint16_t>();
  if (n_layers < 1) {
    throw std::runtime_error("model file has no layers: " + path);
  }

  MlpModel model;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> shapes;
  for (int l = 0; l < n_layers; ++l) {
    const auto fan_in = rd.get<std::uint32_t>();
    const auto fan_out = rd.get<std::uint32_t>();
    const auto act = rd.get<std::uint8_t>();
    if (act > static_cast<std::uint8_t>(Activation::softmax)) {
      throw std::runtime_error("model file has unknown activation: " + path);
    }
    if (l == 0) model.spec.layer_dims.push_back(static_cast<int>(fan_in));
    model.spec.layer_dims.push_back(static_cast<int>(fan_out));
    model.spec.activations.push_back(static_cast<Activation>(act));
    shapes.emplace_back(fan_in, fan_out);
  }
  model.spec.validate();
  for (int l = 0; l < n_layers; ++l) {
    if (static_cast<int>(shapes[l].first) != model.spec.layer_dims[l]) {
      throw std::runtime_error("model file layer shapes inconsistent: " + path);
    }
    Eigen::MatrixXf w(shapes[l].second, shapes[l].first);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      std::vector<float> row(w.cols());
      rd.get_floats(row.data(), row.size());
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = row[c];
    }
    Eigen::VectorXf b(shapes[l].second);
    rd.get_floats(b.data(), static_cast<std::size_t>(b.size()));
    model.weights.push_back(std::move(w));
    model.biases.push_back(std::move(b));
  }
  if (rd.pos() != payload) {
    throw std::runtime_error("model file has trailing bytes: " + path);
  }
  for (const auto& w : model.weights) {
    if (!w.allFinite()) {
      throw std::runtime_error("model file contains non-finite weights: " +
                               path);
    }
  }
  return model;
}

}  // namespace tddnet
