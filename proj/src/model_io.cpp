#include "hakernel/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "hakernel/errors.hpp"

namespace hakernel {
namespace {

constexpr std::string_view kMagic = "HAKERNEL-MODEL";

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const std::string& in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

void put_doubles(std::string& out, const double* p, Eigen::Index count) {
  for (Eigen::Index i = 0; i < count; ++i) put_u64(out, std::bit_cast<std::uint64_t>(p[i]));
}

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t pos, std::size_t end, const std::string& source)
      : bytes_(bytes), pos_(pos), end_(end), source_(source) {}

  void read(double* p, Eigen::Index count) {
    if (static_cast<std::size_t>(count) > (end_ - pos_) / 8) throw DataError("model: " + source_ + " is truncated");
    for (Eigen::Index i = 0; i < count; ++i, pos_ += 8) p[i] = std::bit_cast<double>(get_u64(bytes_, pos_));
  }
  double scalar() {
    double v = 0.0;
    read(&v, 1);
    return v;
  }
  bool done() const { return pos_ == end_; }

 private:
  const std::string& bytes_;
  std::size_t pos_;
  std::size_t end_;
  const std::string& source_;
};

long long header_int(const std::map<std::string, std::string>& h, const std::string& key, const std::string& source) {
  const auto it = h.find(key);
  if (it == h.end()) throw DataError("model: " + source + " header lacks '" + key + "'");
  try {
    std::size_t used = 0;
    const long long v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw DataError("model: " + source + " header field '" + key + "' is not an integer");
  }
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string serialize_model(const FittedModel& model) {
  model.validate();
  std::ostringstream header;
  header << kMagic << '\n'
         << "version " << kModelFormatVersion << '\n'
         << "kind " << kind_name(model.kind) << '\n'
         << "n " << model.n() << '\n'
         << "d " << model.d() << '\n'
         << "k " << model.k << '\n'
         << "m " << model.m << '\n'
         << "lambda " << format_double(model.lambda) << '\n'
         << "features";
  for (const auto& name : model.feature_names) header << ' ' << name;
  header << '\n' << "END\n";

  std::string out = header.str();
  put_u64(out, std::bit_cast<std::uint64_t>(model.lambda));
  put_u64(out, std::bit_cast<std::uint64_t>(model.y_mean));
  put_doubles(out, model.scaler.min.data(), model.scaler.min.size());
  put_doubles(out, model.scaler.max.data(), model.scaler.max.size());
  put_doubles(out, model.X_train.data(), model.X_train.size());
  put_doubles(out, model.gram_column_means.data(), model.gram_column_means.size());
  put_doubles(out, model.U_k.data(), model.U_k.size());
  put_doubles(out, model.D_k.data(), model.D_k.size());
  put_doubles(out, model.beta.data(), model.beta.size());
  put_u64(out, fnv1a64(out));
  return out;
}

FittedModel deserialize_model(const std::string& bytes, const std::string& source) {
  const std::string end_marker = "\nEND\n";
  const auto header_end = bytes.find(end_marker);
  if (bytes.rfind(kMagic, 0) != 0 || header_end == std::string::npos)
    throw DataError("model: " + source + " is not a model file");

  std::map<std::string, std::string> h;
  std::vector<std::string> features;
  {
    std::istringstream lines(bytes.substr(0, header_end));
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
      std::istringstream fields(line);
      std::string key;
      fields >> key;
      if (key == "features") {
        std::string name;
        while (fields >> name) features.push_back(name);
        continue;
      }
      std::string value;
      fields >> value;
      h[key] = value;
    }
  }
  const long long version = header_int(h, "version", source);
  if (version != kModelFormatVersion)
    throw DataError("model: " + source + " has format version " + std::to_string(version) + ", expected " +
                    std::to_string(kModelFormatVersion));

  if (bytes.size() < header_end + end_marker.size() + 8) throw DataError("model: " + source + " is truncated");
  const std::size_t sum_pos = bytes.size() - 8;
  if (fnv1a64(std::string_view(bytes).substr(0, sum_pos)) != get_u64(bytes, sum_pos))
    throw DataError("model: " + source + " checksum mismatch");

  FittedModel model;
  try {
    model.kind = parse_kind(h.count("kind") ? h.at("kind") : "");
  } catch (const UsageError&) {
    throw DataError("model: " + source + " has an unknown estimator kind");
  }
  const auto n = static_cast<Eigen::Index>(header_int(h, "n", source));
  const auto d = static_cast<Eigen::Index>(header_int(h, "d", source));
  model.k = static_cast<Eigen::Index>(header_int(h, "k", source));
  model.m = static_cast<int>(header_int(h, "m", source));
  if (n < 1 || d < 1 || model.k < 1 || model.k > n) throw DataError("model: " + source + " has invalid dimensions");
  model.feature_names = std::move(features);

  Reader r(bytes, header_end + end_marker.size(), sum_pos, source);
  model.lambda = r.scalar();
  model.y_mean = r.scalar();
  model.scaler.min.resize(d);
  model.scaler.max.resize(d);
  r.read(model.scaler.min.data(), d);
  r.read(model.scaler.max.data(), d);
  model.X_train.resize(n, d);
  r.read(model.X_train.data(), n * d);
  model.gram_column_means.resize(n);
  r.read(model.gram_column_means.data(), n);
  model.U_k.resize(n, model.k);
  r.read(model.U_k.data(), n * model.k);
  model.D_k.resize(model.k);
  r.read(model.D_k.data(), model.k);
  model.beta.resize(model.k);
  r.read(model.beta.data(), model.k);
  if (!r.done()) throw DataError("model: " + source + " has trailing bytes");
  model.validate();
  return model;
}

void save_model(const FittedModel& model, const std::filesystem::path& path) {
  const std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("model: cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("model: write to " + path.string() + " failed");
}

FittedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("model: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str(), path.string());
}

}  // namespace hakernel
