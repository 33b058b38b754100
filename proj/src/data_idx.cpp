#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "bootnet/data.hpp"

namespace bootnet {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;
constexpr int kNumClasses = 10;

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_idx: cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset,
                        const std::string& path) {
  if (offset + 4 > bytes.size()) {
    throw IdxParseError(path + ": truncated before 32-bit field", offset);
  }
  return (std::uint32_t(bytes[offset]) << 24) | (std::uint32_t(bytes[offset + 1]) << 16) |
         (std::uint32_t(bytes[offset + 2]) << 8) | std::uint32_t(bytes[offset + 3]);
}

void write_be32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

IdxParseError::IdxParseError(const std::string& message, std::size_t byte_offset)
    : std::runtime_error(message + " (byte offset " + std::to_string(byte_offset) + ")"),
      byte_offset_(byte_offset) {}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  const auto image_bytes = read_file(images_path);
  const auto label_bytes = read_file(labels_path);

  const std::uint32_t image_magic = read_be32(image_bytes, 0, images_path);
  if (image_magic != kImagesMagic) {
    throw IdxParseError(images_path + ": bad image magic", 0);
  }
  const std::uint64_t n = read_be32(image_bytes, 4, images_path);
  const std::uint64_t rows = read_be32(image_bytes, 8, images_path);
  const std::uint64_t cols = read_be32(image_bytes, 12, images_path);
  const std::uint64_t expected_pixels = n * rows * cols;
  if (rows > 4096 || cols > 4096) {
    throw IdxParseError(images_path + ": implausible image dimensions", 8);
  }
  if (image_bytes.size() != 16 + expected_pixels) {
    throw IdxParseError(images_path + ": payload size does not match header", 16);
  }

  const std::uint32_t label_magic = read_be32(label_bytes, 0, labels_path);
  if (label_magic != kLabelsMagic) {
    throw IdxParseError(labels_path + ": bad label magic", 0);
  }
  const std::uint64_t n_labels = read_be32(label_bytes, 4, labels_path);
  if (label_bytes.size() != 8 + n_labels) {
    throw IdxParseError(labels_path + ": payload size does not match header", 8);
  }
  if (n != n_labels) {
    throw std::invalid_argument("load_idx: image count " + std::to_string(n) +
                                " does not match label count " + std::to_string(n_labels));
  }

  Dataset data;
  data.mode = DatasetMode::multiclass;
  data.name = "idx";
  data.provenance = images_path + " + " + labels_path;
  const int dim = static_cast<int>(rows * cols);
  data.features = Matrix(static_cast<int>(n), dim);
  data.labels = Matrix(static_cast<int>(n), kNumClasses);
  for (std::uint64_t i = 0; i < n; ++i) {
    const unsigned char* px = image_bytes.data() + 16 + i * rows * cols;
    double* out = data.features.data() + i * dim;
    for (int p = 0; p < dim; ++p) out[p] = px[p] / 255.0;
    const unsigned char label = label_bytes[8 + i];
    if (label >= kNumClasses) {
      throw IdxParseError(labels_path + ": label value out of range", 8 + i);
    }
    data.labels(static_cast<int>(i), label) = 1.0;
  }
  return data;
}

void write_idx(const Dataset& data, int image_rows, int image_cols,
               const std::string& images_path, const std::string& labels_path) {
  if (data.mode != DatasetMode::multiclass || data.num_classes() != kNumClasses) {
    throw std::invalid_argument("write_idx: expects a 10-class multiclass dataset");
  }
  if (image_rows * image_cols != data.feature_dim()) {
    throw std::invalid_argument("write_idx: rows*cols must equal the feature width");
  }
  std::ofstream images(images_path, std::ios::binary);
  if (!images) throw std::runtime_error("write_idx: cannot open " + images_path);
  write_be32(images, kImagesMagic);
  write_be32(images, static_cast<std::uint32_t>(data.size()));
  write_be32(images, static_cast<std::uint32_t>(image_rows));
  write_be32(images, static_cast<std::uint32_t>(image_cols));
  std::vector<unsigned char> pixel_row(data.feature_dim());
  for (int i = 0; i < data.size(); ++i) {
    for (int p = 0; p < data.feature_dim(); ++p) {
      const double scaled = data.features(i, p) * 255.0;
      const double rounded = std::round(scaled);
      if (std::fabs(scaled - rounded) > 1e-6 || rounded < 0.0 || rounded > 255.0) {
        throw std::invalid_argument("write_idx: features must be exact multiples of 1/255");
      }
      pixel_row[p] = static_cast<unsigned char>(rounded);
    }
    images.write(reinterpret_cast<const char*>(pixel_row.data()), pixel_row.size());
  }
  if (!images) throw std::runtime_error("write_idx: write failed for " + images_path);

  std::ofstream labels(labels_path, std::ios::binary);
  if (!labels) throw std::runtime_error("write_idx: cannot open " + labels_path);
  write_be32(labels, kLabelsMagic);
  write_be32(labels, static_cast<std::uint32_t>(data.size()));
  for (int i = 0; i < data.size(); ++i) {
    int label = 0;
    for (int k = 0; k < kNumClasses; ++k) {
      if (data.labels(i, k) == 1.0) label = k;
    }
    const unsigned char b = static_cast<unsigned char>(label);
    labels.write(reinterpret_cast<const char*>(&b), 1);
  }
  if (!labels) throw std::runtime_error("write_idx: write failed for " + labels_path);
}

Dataset Dataset::take(int count) const {
  if (count < 0 || count > size()) {
    throw std::invalid_argument("Dataset::take: count out of range");
  }
  Dataset out;
  out.mode = mode;
  out.name = name;
  out.provenance = provenance;
  out.features = Matrix(count, feature_dim());
  out.labels = Matrix(count, num_classes());
  std::copy(features.data(), features.data() + static_cast<std::size_t>(count) * feature_dim(),
            out.features.data());
  std::copy(labels.data(), labels.data() + static_cast<std::size_t>(count) * num_classes(),
            out.labels.data());
  return out;
}

}  // namespace bootnet
