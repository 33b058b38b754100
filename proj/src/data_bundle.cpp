#include <cstdlib>
#include <filesystem>

#include "bootnet/data.hpp"

namespace bootnet {

namespace fs = std::filesystem;

namespace {

std::string find_file(const std::string& dir, std::initializer_list<const char*> names) {
  for (const char* name : names) {
    const fs::path p = fs::path(dir) / name;
    if (fs::exists(p)) return p.string();
  }
  return {};
}

}  // namespace

std::optional<DigitsBundle> try_load_mnist_dir(const std::string& dir) {
  if (dir.empty() || !fs::is_directory(dir)) return std::nullopt;
  const std::string train_images =
      find_file(dir, {"train-images-idx3-ubyte", "train-images.idx3-ubyte"});
  const std::string train_labels =
      find_file(dir, {"train-labels-idx1-ubyte", "train-labels.idx1-ubyte"});
  const std::string test_images =
      find_file(dir, {"t10k-images-idx3-ubyte", "t10k-images.idx3-ubyte"});
  const std::string test_labels =
      find_file(dir, {"t10k-labels-idx1-ubyte", "t10k-labels.idx1-ubyte"});
  if (train_images.empty() || train_labels.empty() || test_images.empty() ||
      test_labels.empty()) {
    return std::nullopt;
  }
  DigitsBundle bundle;
  bundle.train = load_idx(train_images, train_labels);
  bundle.test = load_idx(test_images, test_labels);
  bundle.train.name = bundle.test.name = bundle.source = "mnist";
  return bundle;
}

DigitsBundle load_digits_corpus(const std::string& mnist_dir, int synth_train,
                                int synth_test, std::uint64_t seed,
                                const std::string& scratch_dir) {
  std::string dir = mnist_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("MNIST_DIR")) dir = env;
  }
  if (auto mnist = try_load_mnist_dir(dir)) return std::move(*mnist);

  fs::create_directories(scratch_dir);
  const Dataset train = synth_digits(synth_train, seed);
  const Dataset test = synth_digits(synth_test, seed + 1);
  const std::string ti = scratch_dir + "/train-images-idx3-ubyte";
  const std::string tl = scratch_dir + "/train-labels-idx1-ubyte";
  const std::string vi = scratch_dir + "/t10k-images-idx3-ubyte";
  const std::string vl = scratch_dir + "/t10k-labels-idx1-ubyte";
  write_idx(train, 28, 28, ti, tl);
  write_idx(test, 28, 28, vi, vl);

  DigitsBundle bundle;
  bundle.train = load_idx(ti, tl);
  bundle.test = load_idx(vi, vl);
  bundle.train.name = bundle.test.name = bundle.source = "synth-digits";
  return bundle;
}

}  // namespace bootnet
