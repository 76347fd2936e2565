#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netorch/canonical.hpp"
#include "netorch/embedding.hpp"

namespace netorch {

struct Feedback {
  int rating = 0;  // -1, 0, +1
  std::string note;

  bool operator==(const Feedback&) const = default;
};

// One archived interaction: the query, what was planned, how it went, and
// the embedding retrieval ranks against.
struct MemoryRecord {
  int64_t record_id = 0;
  std::string query_text;
  std::string plan_text;     // serialized plan, canonical JSON
  std::string summary_text;  // composed response summary
  std::map<std::string, double> metrics;
  EmbeddingVector embedding{};
  std::optional<Feedback> feedback;

  bool operator==(const MemoryRecord&) const = default;

  Json to_json() const;
  static MemoryRecord from_json(const Json& j);
};

struct ScoredRecord {
  MemoryRecord record;
  double score = 0.0;
};

// Vectorized experience archive. Default-constructed stores live purely in
// memory; open() binds a JSON-Lines file where every mutation appends one
// canonical line — a record line at store time, a patch line per feedback —
// so reopening the file always reconstructs the identical index.
//
// A second, shared archive can be attached read-only at open: its records
// occupy ids 0..s-1 of the merged view and local records follow at s..,
// while each file keeps its own ids dense from 0. Feedback can only target
// local records; a shared id raises UnknownRecord.
class MemoryStore {
 public:
  MemoryStore() = default;

  // A missing local file means an empty archive (it is created on first
  // write); a missing shared file is an IoError, since the caller named it.
  static MemoryStore open(const std::string& path,
                          const std::optional<std::string>& shared_path = std::nullopt);

  // Embeds query_text and appends the record; returns its id in the
  // merged view.
  int64_t store_record(const std::string& query_text, const std::string& plan_text,
                       const std::string& summary_text,
                       const std::map<std::string, double>& metrics);

  // The k records with the highest cosine(embed(query_text), embedding),
  // ties broken newest-id first; fewer when the archive is smaller.
  // Exactly equivalent to a brute-force scan — there is deliberately no
  // approximate index at this scale.
  std::vector<ScoredRecord> retrieve(const std::string& query_text, std::size_t k) const;

  // Raises UnknownRecord / InvalidRating. Returns the updated record.
  MemoryRecord record_feedback(int64_t record_id, int rating, const std::string& note);

  // Rewrites the local file as plain record lines with feedback folded in.
  // No-op for in-memory stores.
  void compact();

  std::size_t size() const { return shared_.size() + local_.size(); }
  bool empty() const { return size() == 0; }
  // By merged-view id; raises UnknownRecord.
  const MemoryRecord& record(int64_t record_id) const;

 private:
  std::vector<MemoryRecord> shared_;  // merged ids 0..s-1
  std::vector<MemoryRecord> local_;   // merged ids s.., stored on disk from 0
  std::string path_;                  // empty -> in-memory only

  void append_line(const std::string& line);
};

}  // namespace netorch
