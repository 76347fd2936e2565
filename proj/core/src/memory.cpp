#include "netorch/memory.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <utility>

#include "field_reader.hpp"
#include "netorch/errors.hpp"

namespace netorch {

namespace {

Feedback feedback_from_json(const Json& j, const std::string& context) {
  FieldReader reader(j, context);
  const Json& rating = reader.get("rating");
  if (!rating.is_number_integer()) {
    throw Error(ErrorCode::kParseError, context + ".rating must be an integer");
  }
  Feedback out;
  out.rating = rating.get<int>();
  if (out.rating < -1 || out.rating > 1) {
    throw Error(ErrorCode::kParseError, context + ".rating must be -1, 0, or +1");
  }
  out.note = require_string(reader.get("note"), context + ".note");
  reader.reject_unknown();
  return out;
}

Json feedback_to_json(const Feedback& feedback) {
  return Json{{"note", feedback.note}, {"rating", feedback.rating}};
}

}  // namespace

Json MemoryRecord::to_json() const {
  Json j{
      {"embedding", embedding},
      {"feedback", nullptr},
      {"metrics", metrics},
      {"plan_text", plan_text},
      {"query_text", query_text},
      {"record_id", record_id},
      {"summary_text", summary_text},
  };
  if (feedback.has_value()) j["feedback"] = feedback_to_json(*feedback);
  return j;
}

MemoryRecord MemoryRecord::from_json(const Json& j) {
  FieldReader reader(j, "memory record");
  MemoryRecord r;
  const Json& id = reader.get("record_id");
  if (!id.is_number_integer() || id.get<int64_t>() < 0) {
    throw Error(ErrorCode::kParseError,
                "memory record.record_id must be a non-negative integer");
  }
  r.record_id = id.get<int64_t>();
  r.query_text = require_string(reader.get("query_text"), "memory record.query_text");
  r.plan_text = require_string(reader.get("plan_text"), "memory record.plan_text");
  r.summary_text = require_string(reader.get("summary_text"), "memory record.summary_text");
  const Json& metrics = reader.get("metrics");
  if (!metrics.is_object()) {
    throw Error(ErrorCode::kParseError, "memory record.metrics must be an object");
  }
  for (auto it = metrics.begin(); it != metrics.end(); ++it) {
    r.metrics[it.key()] = require_number(it.value(), "memory record.metrics." + it.key());
  }
  const Json& embedding = reader.get("embedding");
  if (!embedding.is_array() || embedding.size() != kEmbeddingDim) {
    throw Error(ErrorCode::kParseError, "memory record.embedding must be an array of " +
                                            std::to_string(kEmbeddingDim) + " numbers");
  }
  for (std::size_t i = 0; i < kEmbeddingDim; ++i) {
    r.embedding[i] = require_number(embedding[i], "memory record.embedding entry");
  }
  const Json& feedback = reader.get("feedback");
  if (!feedback.is_null()) {
    r.feedback = feedback_from_json(feedback, "memory record.feedback");
  }
  reader.reject_unknown();
  return r;
}

namespace {

// Replays one archive file: record lines must arrive in id order (dense
// from 0) and patch lines must target an already-seen record, so a valid
// file can always be ingested in one forward pass.
std::vector<MemoryRecord> load_archive(const std::string& path, bool required) {
  std::vector<MemoryRecord> records;
  std::ifstream in(path);
  if (!in) {
    if (required) throw Error(ErrorCode::kIoError, "cannot open archive '" + path + "'");
    return records;
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string context = path + ":" + std::to_string(line_no);
    const Json parsed = parse_json(line, context);
    FieldReader entry(parsed, context);
    const std::string kind = require_string(entry.get("kind"), context + ".kind");
    if (kind == "record") {
      MemoryRecord record = MemoryRecord::from_json(entry.get("record"));
      if (record.record_id != static_cast<int64_t>(records.size())) {
        throw Error(ErrorCode::kParseError,
                    context + ": record_id " + std::to_string(record.record_id) +
                        " out of order (expected " + std::to_string(records.size()) + ")");
      }
      records.push_back(std::move(record));
    } else if (kind == "feedback") {
      const Json& id = entry.get("record_id");
      if (!id.is_number_integer() || id.get<int64_t>() < 0 ||
          id.get<int64_t>() >= static_cast<int64_t>(records.size())) {
        throw Error(ErrorCode::kParseError,
                    context + ": feedback patch targets an unknown record");
      }
      records[id.get<std::size_t>()].feedback =
          feedback_from_json(entry.get("feedback"), context + ".feedback");
    } else {
      throw Error(ErrorCode::kParseError, context + ": unknown line kind '" + kind + "'");
    }
    entry.reject_unknown();
  }
  return records;
}

}  // namespace

MemoryStore MemoryStore::open(const std::string& path,
                              const std::optional<std::string>& shared_path) {
  MemoryStore store;
  store.path_ = path;
  if (shared_path.has_value()) {
    store.shared_ = load_archive(*shared_path, /*required=*/true);
  }
  store.local_ = load_archive(path, /*required=*/false);
  const int64_t base = static_cast<int64_t>(store.shared_.size());
  for (MemoryRecord& record : store.local_) record.record_id += base;
  return store;
}

void MemoryStore::append_line(const std::string& line) {
  std::ofstream out(path_, std::ios::app);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot append to archive '" + path_ + "'");
  }
  out << line << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write to '" + path_ + "' failed");
}

int64_t MemoryStore::store_record(const std::string& query_text,
                                  const std::string& plan_text,
                                  const std::string& summary_text,
                                  const std::map<std::string, double>& metrics) {
  MemoryRecord record;
  record.record_id = static_cast<int64_t>(size());
  record.query_text = query_text;
  record.plan_text = plan_text;
  record.summary_text = summary_text;
  record.metrics = metrics;
  record.embedding = embed_text(query_text);

  if (!path_.empty()) {
    Json on_disk = record.to_json();
    on_disk["record_id"] = static_cast<int64_t>(local_.size());  // file-local id
    append_line(canonical_dump(Json{{"kind", "record"}, {"record", std::move(on_disk)}}));
  }
  local_.push_back(std::move(record));
  return local_.back().record_id;
}

std::vector<ScoredRecord> MemoryStore::retrieve(const std::string& query_text,
                                                std::size_t k) const {
  if (k < 1) {
    throw Error(ErrorCode::kIndexOutOfRange, "retrieve needs k >= 1");
  }
  const EmbeddingVector query = embed_text(query_text);
  std::vector<ScoredRecord> scored;
  scored.reserve(size());
  for (const auto* records : {&shared_, &local_}) {
    for (const MemoryRecord& record : *records) {
      scored.push_back({record, cosine_similarity(query, record.embedding)});
    }
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredRecord& a, const ScoredRecord& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.record.record_id > b.record.record_id;
                   });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

MemoryRecord MemoryStore::record_feedback(int64_t record_id, int rating,
                                          const std::string& note) {
  if (rating < -1 || rating > 1) {
    throw Error(ErrorCode::kInvalidRating,
                "rating must be -1, 0, or +1 (got " + std::to_string(rating) + ")");
  }
  const int64_t base = static_cast<int64_t>(shared_.size());
  if (record_id >= 0 && record_id < base) {
    throw Error(ErrorCode::kUnknownRecord,
                "record " + std::to_string(record_id) +
                    " lives in the read-only shared archive");
  }
  if (record_id < 0 || record_id >= static_cast<int64_t>(size())) {
    throw Error(ErrorCode::kUnknownRecord,
                "no record " + std::to_string(record_id) + " in an archive of " +
                    std::to_string(size()) + " records");
  }
  MemoryRecord& record = local_[static_cast<std::size_t>(record_id - base)];
  record.feedback = Feedback{rating, note};
  if (!path_.empty()) {
    append_line(canonical_dump(Json{
        {"feedback", feedback_to_json(*record.feedback)},
        {"kind", "feedback"},
        {"record_id", record_id - base},
    }));
  }
  return record;
}

const MemoryRecord& MemoryStore::record(int64_t record_id) const {
  if (record_id < 0 || record_id >= static_cast<int64_t>(size())) {
    throw Error(ErrorCode::kUnknownRecord,
                "no record " + std::to_string(record_id) + " in an archive of " +
                    std::to_string(size()) + " records");
  }
  const std::size_t i = static_cast<std::size_t>(record_id);
  return i < shared_.size() ? shared_[i] : local_[i - shared_.size()];
}

void MemoryStore::compact() {
  if (path_.empty()) return;
  const std::string tmp = path_ + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + tmp + "'");
    const int64_t base = static_cast<int64_t>(shared_.size());
    for (const MemoryRecord& record : local_) {
      Json on_disk = record.to_json();
      on_disk["record_id"] = record.record_id - base;
      out << canonical_dump(Json{{"kind", "record"}, {"record", std::move(on_disk)}})
          << '\n';
    }
    if (!out) throw Error(ErrorCode::kIoError, "write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path_, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError, "cannot replace '" + path_ + "': " + ec.message());
  }
}

}  // namespace netorch
