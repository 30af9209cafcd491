#include "glsc/embedding_store.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <sstream>

#include "glsc/error.hpp"
#include "glsc/simd/kernels.hpp"
#include "glsc/utf8.hpp"

namespace glsc {

namespace {

constexpr std::string_view kMagic = "GLSCEMB1";

double norm_of(std::span<const float> v) {
  return std::sqrt(simd::dot(v.data(), v.data(), v.size()));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 3; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(bytes_[pos_ + k]);
    pos_ += 4;
    return v;
  }
  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>(static_cast<unsigned char>(bytes_[pos_]) |
                                              (static_cast<unsigned char>(bytes_[pos_ + 1]) << 8));
    pos_ += 2;
    return v;
  }
  std::string str(std::size_t len) {
    need(len);
    std::string s(bytes_.substr(pos_, len));
    pos_ += len;
    return s;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::kParse, "truncated binary embedding file at byte " + std::to_string(pos_));
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void check_id(const std::string& id, std::string_view what) {
  if (id.empty() || !utf8::is_valid(id)) {
    throw Error(ErrorCode::kParse, "invalid " + std::string(what) + " '" + id + "'");
  }
}

EmbeddingStore load_text(std::istream& in, EmbeddingLoadOptions options) {
  std::vector<Embedding> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected 3 tab-separated fields");
    }
    Embedding e;
    e.segment_id = line.substr(0, tab1);
    e.speaker_id = line.substr(tab1 + 1, tab2 - tab1 - 1);
    const char* p = line.data() + tab2 + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p == end) break;
      float value = 0.0F;
      auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t')) {
        throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": bad number");
      }
      e.vector.push_back(value);
      p = next;
    }
    records.push_back(std::move(e));
  }
  return EmbeddingStore::from_records(std::move(records), options);
}

EmbeddingStore load_binary(std::string_view bytes, EmbeddingLoadOptions options) {
  if (bytes.substr(0, kMagic.size()) != kMagic) {
    throw Error(ErrorCode::kBadMagic, "binary embedding file must start with GLSCEMB1");
  }
  ByteReader reader(bytes.substr(kMagic.size()));
  const std::uint32_t count = reader.u32();
  const std::uint32_t dim = reader.u32();
  std::vector<Embedding> records;
  records.reserve(std::min<std::uint32_t>(count, 1U << 20));
  for (std::uint32_t r = 0; r < count; ++r) {
    Embedding e;
    e.segment_id = reader.str(reader.u16());
    e.speaker_id = reader.str(reader.u16());
    e.vector.resize(dim);
    for (auto& x : e.vector) x = reader.f32();
    records.push_back(std::move(e));
  }
  if (!reader.done()) throw Error(ErrorCode::kParse, "trailing bytes after last embedding record");
  if (count == 0 && dim != 0) throw Error(ErrorCode::kDimMismatch, "empty store with nonzero dimension");
  return EmbeddingStore::from_records(std::move(records), options);
}

}  // namespace

EmbeddingStore EmbeddingStore::from_records(std::vector<Embedding> records,
                                            EmbeddingLoadOptions options) {
  EmbeddingStore store;
  store.normalized_ = options.normalize;
  if (records.empty()) return store;
  store.dim_ = records.front().vector.size();
  if (store.dim_ == 0) throw Error(ErrorCode::kDimMismatch, "embedding dimension must be positive");

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].segment_id < records[b].segment_id;
  });

  store.data_.reserve(records.size() * store.dim_);
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto& rec = records[order[k]];
    check_id(rec.segment_id, "segment id");
    check_id(rec.speaker_id, "speaker id");
    if (k > 0 && rec.segment_id == store.segment_ids_.back()) {
      throw Error(ErrorCode::kDupSegmentId, "duplicate segment id '" + rec.segment_id + "'");
    }
    if (rec.vector.size() != store.dim_) {
      throw Error(ErrorCode::kDimMismatch,
                  "segment '" + rec.segment_id + "' has dimension " +
                      std::to_string(rec.vector.size()) + ", expected " +
                      std::to_string(store.dim_));
    }
    if (!std::all_of(rec.vector.begin(), rec.vector.end(), [](float x) { return std::isfinite(x); })) {
      throw Error(ErrorCode::kNonFinite, "segment '" + rec.segment_id + "' has non-finite entries");
    }
    const double norm = norm_of(rec.vector);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::kZeroVector, "segment '" + rec.segment_id + "' has zero norm");
    }
    if (options.normalize && std::abs(norm - 1.0) > kUnitNormTolerance) {
      for (auto& x : rec.vector) x = static_cast<float>(static_cast<double>(x) / norm);
    }
    store.data_.insert(store.data_.end(), rec.vector.begin(), rec.vector.end());
    store.index_.emplace(rec.segment_id, store.segment_ids_.size());
    store.segment_ids_.push_back(std::move(rec.segment_id));
    store.speaker_ids_.push_back(std::move(rec.speaker_id));
  }
  return store;
}

std::optional<std::size_t> EmbeddingStore::find(std::string_view segment_id) const {
  auto it = index_.find(std::string(segment_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingStore EmbeddingStore::subset(std::span<const std::size_t> indices) const {
  std::vector<std::size_t> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  EmbeddingStore out;
  out.dim_ = sorted.empty() ? 0 : dim_;
  out.normalized_ = normalized_;
  for (std::size_t i : sorted) {
    out.index_.emplace(segment_ids_[i], out.segment_ids_.size());
    out.segment_ids_.push_back(segment_ids_[i]);
    out.speaker_ids_.push_back(speaker_ids_[i]);
    const auto v = vector(i);
    out.data_.insert(out.data_.end(), v.begin(), v.end());
  }
  return out;
}

EmbeddingFormat sniff_embedding_format(std::string_view head) {
  return head.substr(0, kMagic.size()) == kMagic ? EmbeddingFormat::kBinary : EmbeddingFormat::kText;
}

EmbeddingStore load_embeddings(std::istream& in, EmbeddingFormat format,
                               EmbeddingLoadOptions options) {
  if (format == EmbeddingFormat::kText) return load_text(in, options);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_binary(bytes, options);
}

EmbeddingStore load_embeddings_file(const std::string& path, EmbeddingLoadOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open embeddings file '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (sniff_embedding_format(bytes) == EmbeddingFormat::kBinary) return load_binary(bytes, options);
  std::istringstream text(bytes);
  return load_text(text, options);
}

void save_embeddings(const EmbeddingStore& store, std::ostream& out, EmbeddingFormat format) {
  std::string buf;
  if (format == EmbeddingFormat::kBinary) {
    buf.append(kMagic);
    put_u32(buf, static_cast<std::uint32_t>(store.size()));
    put_u32(buf, static_cast<std::uint32_t>(store.dim()));
    for (std::size_t i = 0; i < store.size(); ++i) {
      for (const std::string* id : {&store.segment_id(i), &store.speaker_id(i)}) {
        if (id->size() > 0xFFFF) throw Error(ErrorCode::kInvalidArgument, "identifier longer than 65535 bytes");
        put_u16(buf, static_cast<std::uint16_t>(id->size()));
        buf.append(*id);
      }
      for (float x : store.vector(i)) put_u32(buf, std::bit_cast<std::uint32_t>(x));
    }
  } else {
    std::array<char, 64> num{};
    for (std::size_t i = 0; i < store.size(); ++i) {
      buf.append(store.segment_id(i));
      buf.push_back('\t');
      buf.append(store.speaker_id(i));
      buf.push_back('\t');
      bool first = true;
      for (float x : store.vector(i)) {
        if (!first) buf.push_back(' ');
        first = false;
        auto [end, ec] = std::to_chars(num.data(), num.data() + num.size(), x);
        buf.append(num.data(), end);
      }
      buf.push_back('\n');
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed to write embeddings");
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kDimMismatch, "cosine of vectors with different dimension");
  const double na = simd::dot(a.data(), a.data(), a.size());
  const double nb = simd::dot(b.data(), b.data(), b.size());
  if (!(na > 0.0) || !(nb > 0.0)) throw Error(ErrorCode::kZeroVector, "cosine of zero vector");
  const double c = simd::dot(a.data(), b.data(), a.size()) / std::sqrt(na * nb);
  return std::clamp(c, -1.0, 1.0);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kDimMismatch, "cosine of vectors with different dimension");
  double ab = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (!(aa > 0.0) || !(bb > 0.0)) throw Error(ErrorCode::kZeroVector, "cosine of zero vector");
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

Centroid centroid_of(const EmbeddingStore& store, std::span<const std::size_t> members,
                     int cluster_id) {
  if (members.empty()) throw Error(ErrorCode::kEmptyCluster, "centroid of empty cluster");
  Centroid c;
  c.cluster_id = cluster_id;
  c.member_count = members.size();
  c.vector.assign(store.dim(), 0.0);
  for (std::size_t idx : members) {
    const auto v = store.vector(idx);
    const double norm = norm_of(v);
    for (std::size_t k = 0; k < v.size(); ++k) c.vector[k] += static_cast<double>(v[k]) / norm;
  }
  double sq = 0.0;
  for (double x : c.vector) sq += x * x;
  const double norm = std::sqrt(sq);
  // Relative to the member count: the sum of n unit vectors has norm <= n.
  if (!(norm > 1e-12 * static_cast<double>(members.size()))) {
    throw Error(ErrorCode::kZeroVector, "cluster mean direction is numerically zero");
  }
  for (double& x : c.vector) x /= norm;
  return c;
}

}  // namespace glsc
