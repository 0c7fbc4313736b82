#pragma once

// Triplet corpus ingestion, forum filtering, annotation and splitting.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chesscomm/chess.hpp"
#include "chesscomm/error.hpp"
#include "chesscomm/pgn.hpp"
#include "chesscomm/representation.hpp"
#include "chesscomm/tags.hpp"
#include "chesscomm/tagset.hpp"

namespace chesscomm::corpus {

class IoFailure : public Error {
 public:
  using Error::Error;
};

// Errors tied to one input line (1-based).
class RecordError : public Error {
 public:
  RecordError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};
class JsonSyntax : public RecordError {
 public:
  using RecordError::RecordError;
};
// Missing or mistyped fields.
class MalformedRecord : public RecordError {
 public:
  using RecordError::RecordError;
};
class IllegalMove : public RecordError {
 public:
  using RecordError::RecordError;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// ---- triplets -----------------------------------------------------------

// (G, M, C): the game so far, the commented move and its commentary.
struct TripletRecord {
  chess::GameRecord game;  // plies before the commented move
  chess::MoveRecord move;
  tags::Commentary commentary;
  std::string source;
  std::string game_id;  // "game" field when present, otherwise source
  std::size_t line = 0;

  chess::BoardState anchor() const { return game.final_position(); }
};

// Parses one JSONL line: {"moves": [SAN...], "move": SAN, "commentary":
// str, "source": str} plus an optional "game" id and "fen" start position.
// Throws JsonSyntax, MalformedRecord or IllegalMove.
TripletRecord parse_triplet(std::string_view line, std::size_t line_no = 1);
std::string to_jsonl(const TripletRecord& record);

struct LoadIssue {
  std::size_t line;
  std::string message;
};

// Streams records from a JSONL file. Lenient mode skips bad lines and
// records them in issues(); strict mode rethrows the first failure. Blank
// lines are ignored.
class TripletReader {
 public:
  // Throws IoFailure.
  explicit TripletReader(const std::filesystem::path& path, bool strict = false);

  std::optional<TripletRecord> next();
  const std::vector<LoadIssue>& issues() const { return issues_; }

 private:
  std::ifstream in_;
  bool strict_;
  std::size_t line_no_ = 0;
  std::vector<LoadIssue> issues_;
};

struct LoadResult {
  std::vector<TripletRecord> records;
  std::vector<LoadIssue> issues;
};

LoadResult load_triplets(const std::filesystem::path& path, bool strict = false);

// ---- forum posts --------------------------------------------------------

struct ForumPost {
  std::vector<std::string> thread;  // question and earlier posts, in order
  std::string response;
  std::optional<int> votes;
  std::vector<std::string> tags;  // site tags where available
};

// Throws MalformedRecord on a missing or empty response.
ForumPost parse_forum_post(std::string_view line, std::size_t line_no = 1);

enum class ForumPattern : int { Notation = 1, MoveNumber = 2, EventToken = 3, PieceToken = 4 };

// The seventeen event tokens, lower case.
const std::vector<std::string>& event_tokens();

struct FilterConfig {
  std::vector<std::string> irrelevant_tags;  // drop posts carrying any of these
  std::vector<std::string> internal_hosts;   // links to these are not external
};

struct FilterDecision {
  bool keep = false;
  std::vector<ForumPattern> patterns;  // ascending, deduplicated
  std::vector<std::string> matches;    // "pattern:token" for each match found
  std::string drop_reason;             // "external-link", "irrelevant-tag", "no-pattern"
};

FilterDecision filter_forum_post(const ForumPost& post, const FilterConfig& config = {});

// Emails, URLs, @-handles and u/-style usernames become [EMAIL], [URL]
// and [USER]. Idempotent; chess notation is never touched.
std::string scrub_pii(std::string_view text);

// ---- annotation ---------------------------------------------------------

struct AnnotatedRecord {
  const TripletRecord* record = nullptr;
  tags::Annotation annotation;
  std::vector<std::pair<repr::Ablation, repr::InputText>> inputs;
};

AnnotatedRecord annotate_record(const TripletRecord& record, const tags::ExtractorSet& extractors,
                                const std::vector<repr::RepresentationConfig>& ablations);

struct AnnotateSummary {
  std::size_t records = 0;
  std::size_t with_warnings = 0;
  std::map<std::string, std::size_t> warnings_by_extractor;

  void add(const AnnotatedRecord& r);
};

// One output per input record, in order.
std::vector<AnnotatedRecord> annotate_corpus(const std::vector<TripletRecord>& records,
                                             const tags::ExtractorSet& extractors,
                                             const std::vector<repr::RepresentationConfig>& ablations,
                                             AnnotateSummary* summary = nullptr);

// {"source", "game", "moves", "move", "commentary", "tags", "inputs": {ablation: text},
// "warnings": [...]}
std::string to_jsonl(const AnnotatedRecord& r);

// Tag-set JSON object used by annotated output and extractor evaluation.
std::string tagset_to_json(const TagSet& tags);
// Accepts the object itself or any object with a "tags" member. Throws
// JsonSyntax / MalformedRecord.
TagSet tagset_from_json(std::string_view text, std::size_t line_no = 1);

// ---- splits -------------------------------------------------------------

struct SplitSpec {
  std::array<int, 3> ratios{85, 10, 5};  // train, valid, test
  std::uint64_t seed = 0;

  // Throws Error unless nonnegative and summing to 100.
  void validate() const;
  // "85:10:5"
  static std::array<int, 3> parse_ratios(std::string_view text);
};

enum class Split : std::uint8_t { Train, Valid, Test };
std::string_view to_string(Split s);

// Stable 64-bit key of (seed, game id).
std::uint64_t split_key(std::uint64_t seed, std::string_view game_id);

// Split per item. Games are visited in split_key order and placed whole
// into test, then valid, while they fit the floor(n * ratio / 100) quota;
// everything else goes to train. With one record per game the counts are
// exact. The result depends only on the multiset of ids and the seed.
std::vector<Split> assign_splits(const std::vector<std::string>& game_ids, const SplitSpec& spec);

struct SplitResult {
  std::vector<TripletRecord> train, valid, test;
};

SplitResult split_dataset(const std::vector<TripletRecord>& records, const SplitSpec& spec);

// ---- extractor evaluation ----------------------------------------------

// Macro F1 over the union of labels seen in gold and predictions. Per
// label F1 = 2TP / (2TP + FP + FN). An empty prediction never matches.
// Throws LengthMismatch.
double macro_f1(const std::vector<std::string>& predicted, const std::vector<std::string>& gold);

struct ExtractorMetrics {
  std::size_t examples = 0;
  std::optional<double> commentary_type_f1;
  std::optional<double> move_quality_f1;
  std::optional<double> length_f1;
  // Share of examples whose token lists match exactly.
  std::optional<double> suggested_exact;
  std::optional<double> pronoun_exact;
  std::optional<double> proper_noun_exact;
};

// Classifier families are scored on pairs whose gold value is present.
// Generative families are scored on pairs where either side is non-empty.
// Throws LengthMismatch.
ExtractorMetrics evaluate_extractor(const std::vector<TagSet>& predictions,
                                    const std::vector<TagSet>& gold);

std::string to_json(const ExtractorMetrics& m);

}  // namespace chesscomm::corpus
