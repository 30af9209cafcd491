#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace glsc {

/// Speaker embedding of one speech segment, as ingested.
struct Embedding {
  std::string segment_id;
  std::string speaker_id;
  std::vector<float> vector;
};

enum class EmbeddingFormat { kText, kBinary };

struct EmbeddingLoadOptions {
  // Rescale every vector to unit L2 norm. Vectors already within
  // kUnitNormTolerance of unit norm are left bit-for-bit untouched so that
  // save/load cycles are stable.
  bool normalize = true;
};

inline constexpr double kUnitNormTolerance = 1e-6;

/// Immutable, validated set of equal-dimension embeddings stored contiguously
/// in canonical order (ascending segment_id).
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  /// Validates and canonicalizes. Throws kDimMismatch, kNonFinite,
  /// kDupSegmentId or kZeroVector.
  static EmbeddingStore from_records(std::vector<Embedding> records,
                                     EmbeddingLoadOptions options = {});

  std::size_t size() const { return segment_ids_.size(); }
  bool empty() const { return segment_ids_.empty(); }
  std::size_t dim() const { return dim_; }
  bool normalized() const { return normalized_; }

  const std::string& segment_id(std::size_t i) const { return segment_ids_[i]; }
  const std::string& speaker_id(std::size_t i) const { return speaker_ids_[i]; }
  std::span<const float> vector(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  const float* row(std::size_t i) const { return data_.data() + i * dim_; }

  std::optional<std::size_t> find(std::string_view segment_id) const;

  /// Store restricted to the given indices (order of the result stays canonical).
  EmbeddingStore subset(std::span<const std::size_t> indices) const;

 private:
  std::size_t dim_ = 0;
  bool normalized_ = false;
  std::vector<std::string> segment_ids_;
  std::vector<std::string> speaker_ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Text: `segment_id<TAB>speaker_id<TAB>v1 v2 ... vd`, '#' lines ignored.
// Binary: "GLSCEMB1", u32 count, u32 dim, then per record u16-prefixed
// segment_id and speaker_id followed by dim little-endian float32 values.
EmbeddingStore load_embeddings(std::istream& in, EmbeddingFormat format,
                               EmbeddingLoadOptions options = {});
EmbeddingStore load_embeddings_file(const std::string& path, EmbeddingLoadOptions options = {});
void save_embeddings(const EmbeddingStore& store, std::ostream& out, EmbeddingFormat format);

// Format picked from content: binary if the file starts with the magic bytes.
EmbeddingFormat sniff_embedding_format(std::string_view head);

/// dot(a,b)/(|a||b|) clamped to [-1, 1]. Throws kZeroVector / kDimMismatch.
double cosine_similarity(std::span<const float> a, std::span<const float> b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Spherical mean direction of a cluster.
struct Centroid {
  int cluster_id = 0;
  std::vector<double> vector;
  std::size_t member_count = 0;
};

/// Mean of the members' unit-normalized vectors, re-normalized. Throws
/// kEmptyCluster on no members and kZeroVector when the mean vanishes.
Centroid centroid_of(const EmbeddingStore& store, std::span<const std::size_t> members,
                     int cluster_id = 0);

}  // namespace glsc
