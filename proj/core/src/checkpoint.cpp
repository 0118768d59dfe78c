#include "playcomm/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "playcomm/errors.hpp"

namespace playcomm::nn {

namespace {

// All multi-byte fields are little-endian. This host is assumed LE; the
// writer/reader pair below keeps the format explicit either way.
class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void f32(float v) { raw(&v, 4); }
  void f64(double v) { raw(&v, 8); }
  void raw(const void* p, std::size_t n) {
    const char* c = static_cast<const char*>(p);
    bytes_.insert(bytes_.end(), c, c + n);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class Reader {
 public:
  Reader(const std::vector<char>& bytes, const std::string& path)
      : bytes_(bytes), path_(path) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() {
    std::uint32_t v;
    std::memcpy(&v, take(4), 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    std::memcpy(&v, take(8), 8);
    return v;
  }
  float f32() {
    float v;
    std::memcpy(&v, take(4), 4);
    return v;
  }
  double f64() {
    double v;
    std::memcpy(&v, take(8), 8);
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    const char* p = take(n);
    return std::string(p, n);
  }
  const char* take(std::size_t n) {
    if (pos_ + n > bytes_.size()) {
      throw InputError("checkpoint " + path_ + ": truncated, expected " +
                       std::to_string(pos_ + n) + " bytes, got " +
                       std::to_string(bytes_.size()));
    }
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  bool exhausted() const { return pos_ == bytes_.size(); }
  std::size_t pos() const { return pos_; }

 private:
  const std::vector<char>& bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

void write_tensor(Writer& w, const TensorF& t) {
  w.u32(static_cast<std::uint32_t>(t.rank()));
  for (std::size_t d : t.shape()) w.u32(static_cast<std::uint32_t>(d));
  w.u64(static_cast<std::uint64_t>(t.numel()) * 4);
  w.raw(t.data(), t.numel() * 4);
}

TensorF read_tensor(Reader& r, const std::string& path) {
  const std::uint32_t rank = r.u32();
  if (rank > 8) {
    throw InputError("checkpoint " + path + ": implausible tensor rank " +
                     std::to_string(rank));
  }
  std::vector<std::size_t> shape;
  std::size_t numel = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    shape.push_back(r.u32());
    numel *= shape.back();
  }
  const std::uint64_t bytes = r.u64();
  if (bytes != static_cast<std::uint64_t>(numel) * 4) {
    throw InputError("checkpoint " + path + ": tensor payload " +
                     std::to_string(bytes) + " bytes does not match declared shape " +
                     TensorF::shape_string(shape));
  }
  TensorF t(shape);
  std::memcpy(t.data(), r.take(numel * 4), numel * 4);
  return t;
}

void write_arch(Writer& w, const ArchitectureConfig& a) {
  Writer block;
  block.u32(static_cast<std::uint32_t>(a.input_height));
  block.u32(static_cast<std::uint32_t>(a.input_width));
  block.u32(static_cast<std::uint32_t>(a.input_channels));
  block.u32(static_cast<std::uint32_t>(a.conv_filters.size()));
  for (std::size_t f : a.conv_filters) block.u32(static_cast<std::uint32_t>(f));
  block.u32(static_cast<std::uint32_t>(a.filter_size));
  block.u32(static_cast<std::uint32_t>(a.fc1_units));
  block.u32(static_cast<std::uint32_t>(a.output_dim));
  block.u32(static_cast<std::uint32_t>(a.pool_size));
  block.u32(static_cast<std::uint32_t>(a.pool_stride));
  block.f64(a.dropout_keep);
  block.f64(a.negative_slope);
  w.u32(static_cast<std::uint32_t>(block.bytes().size()));
  w.raw(block.bytes().data(), block.bytes().size());
}

ArchitectureConfig read_arch(Reader& r, const std::string& path) {
  const std::uint32_t len = r.u32();
  const std::size_t end = r.pos() + len;
  ArchitectureConfig a;
  a.input_height = r.u32();
  a.input_width = r.u32();
  a.input_channels = r.u32();
  const std::uint32_t n_conv = r.u32();
  if (n_conv != 3) {
    throw InputError("checkpoint " + path + ": expected 3 conv stages, got " +
                     std::to_string(n_conv));
  }
  a.conv_filters.clear();
  for (std::uint32_t i = 0; i < n_conv; ++i) a.conv_filters.push_back(r.u32());
  a.filter_size = r.u32();
  a.fc1_units = r.u32();
  a.output_dim = r.u32();
  a.pool_size = r.u32();
  a.pool_stride = r.u32();
  a.dropout_keep = r.f64();
  a.negative_slope = r.f64();
  if (r.pos() != end) {
    throw InputError("checkpoint " + path + ": architecture block length " +
                     std::to_string(len) + " does not match its contents");
  }
  return a;
}

}  // namespace

std::vector<std::vector<std::size_t>> checkpoint_tensor_shapes(
    const ArchitectureConfig& arch) {
  arch.validate();
  const std::size_t k = arch.filter_size;
  std::vector<std::vector<std::size_t>> shapes;
  std::size_t channels = arch.input_channels;
  for (std::size_t f : arch.conv_filters) {
    shapes.push_back({k, k, channels, f});
    shapes.push_back({f});
    channels = f;
  }
  shapes.push_back({arch.flatten_size(), arch.fc1_units});
  shapes.push_back({arch.fc1_units});
  shapes.push_back({arch.fc1_units, arch.output_dim});
  shapes.push_back({arch.output_dim});
  return shapes;
}

void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path) {
  const auto want = checkpoint_tensor_shapes(ckpt.arch);
  if (ckpt.tensors.size() != want.size()) {
    throw std::invalid_argument("save_checkpoint: expected " +
                                std::to_string(want.size()) + " tensors, got " +
                                std::to_string(ckpt.tensors.size()));
  }
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (ckpt.tensors[i].shape() != want[i]) {
      throw std::invalid_argument(
          "save_checkpoint: tensor " + std::to_string(i) + " shape " +
          ckpt.tensors[i].shape_string() + " does not match architecture (" +
          TensorF::shape_string(want[i]) + ")");
    }
  }

  Writer w;
  w.raw(kCheckpointMagic, 8);
  w.u32(ckpt.format_version);
  write_arch(w, ckpt.arch);
  w.u32(static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& t : ckpt.tensors) write_tensor(w, t);

  w.u8(ckpt.optimizer ? 1 : 0);
  if (ckpt.optimizer) {
    const AdamSnapshot& o = *ckpt.optimizer;
    w.f64(o.config.learning_rate);
    w.f64(o.config.beta1);
    w.f64(o.config.beta2);
    w.f64(o.config.epsilon);
    w.u64(o.step_count);
    if (o.first_moments.size() != ckpt.tensors.size() ||
        o.second_moments.size() != ckpt.tensors.size()) {
      throw std::invalid_argument("save_checkpoint: optimizer moment count mismatch");
    }
    for (const auto& t : o.first_moments) write_tensor(w, t);
    for (const auto& t : o.second_moments) write_tensor(w, t);
  }

  w.u64(ckpt.meta.seed);
  w.u32(ckpt.meta.epochs_run);
  w.f64(ckpt.meta.final_loss);
  w.u64(ckpt.meta.dataset_fingerprint);
  w.str(ckpt.meta.label);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("save_checkpoint: cannot open " + path + " for writing");
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("load_checkpoint: cannot open " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  Reader r(bytes, path);

  char magic[8];
  std::memcpy(magic, r.take(8), 8);
  if (std::memcmp(magic, kCheckpointMagic, 8) != 0) {
    throw InputError("checkpoint " + path + ": bad magic, not a model checkpoint");
  }
  ModelCheckpoint ckpt;
  ckpt.format_version = r.u32();
  if (ckpt.format_version != kCheckpointVersion) {
    throw InputError("checkpoint " + path + ": unsupported format version " +
                     std::to_string(ckpt.format_version) + " (expected " +
                     std::to_string(kCheckpointVersion) + ")");
  }
  ckpt.arch = read_arch(r, path);
  const auto want = checkpoint_tensor_shapes(ckpt.arch);
  const std::uint32_t n_tensors = r.u32();
  if (n_tensors != want.size()) {
    throw InputError("checkpoint " + path + ": expected " +
                     std::to_string(want.size()) + " tensors, found " +
                     std::to_string(n_tensors));
  }
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    TensorF t = read_tensor(r, path);
    if (t.shape() != want[i]) {
      throw InputError("checkpoint " + path + ": tensor " + std::to_string(i) +
                       " shape " + t.shape_string() +
                       " does not match architecture (" +
                       TensorF::shape_string(want[i]) + ")");
    }
    ckpt.tensors.push_back(std::move(t));
  }

  if (r.u8() != 0) {
    AdamSnapshot o;
    o.config.learning_rate = r.f64();
    o.config.beta1 = r.f64();
    o.config.beta2 = r.f64();
    o.config.epsilon = r.f64();
    o.step_count = r.u64();
    for (std::uint32_t i = 0; i < n_tensors; ++i) {
      o.first_moments.push_back(read_tensor(r, path));
    }
    for (std::uint32_t i = 0; i < n_tensors; ++i) {
      o.second_moments.push_back(read_tensor(r, path));
    }
    ckpt.optimizer = std::move(o);
  }

  ckpt.meta.seed = r.u64();
  ckpt.meta.epochs_run = r.u32();
  ckpt.meta.final_loss = r.f64();
  ckpt.meta.dataset_fingerprint = r.u64();
  ckpt.meta.label = r.str();

  if (!r.exhausted()) {
    throw InputError("checkpoint " + path + ": " +
                     std::to_string(bytes.size() - r.pos()) +
                     " trailing bytes after payload");
  }
  return ckpt;
}

ModelCheckpoint checkpoint_from_model(Model<float>& model, CheckpointMeta meta,
                                      const AdamSnapshot* optimizer) {
  ModelCheckpoint ckpt;
  ckpt.arch = model.config();
  for (const auto& ref : model.params()) ckpt.tensors.push_back(*ref.value);
  if (optimizer) ckpt.optimizer = *optimizer;
  ckpt.meta = std::move(meta);
  return ckpt;
}

Model<float> model_from_checkpoint(const ModelCheckpoint& ckpt) {
  const auto want = checkpoint_tensor_shapes(ckpt.arch);
  if (ckpt.tensors.size() != want.size()) {
    throw InputError("checkpoint: expected " + std::to_string(want.size()) +
                     " tensors, got " + std::to_string(ckpt.tensors.size()));
  }
  Model<float> model(ckpt.arch, /*seed=*/0);
  auto refs = model.params();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (ckpt.tensors[i].shape() != refs[i].value->shape()) {
      throw InputError("checkpoint: tensor " + std::to_string(i) + " shape " +
                       ckpt.tensors[i].shape_string() + " does not match " +
                       refs[i].name);
    }
    *refs[i].value = ckpt.tensors[i];
  }
  return model;
}

}  // namespace playcomm::nn
