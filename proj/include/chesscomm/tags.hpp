#pragma once

// Rule-based extraction of control tags from commentary text.
//
// Each extractor is a pure function of its inputs. A learned model can be
// swapped in for the commentary-type classifier or the entity recognizer
// through the TextClassifier / EntityRecognizer interfaces.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chesscomm/chess.hpp"
#include "chesscomm/error.hpp"
#include "chesscomm/tagset.hpp"

namespace chesscomm::tags {

struct Commentary {
  std::string text;
  std::size_t ply_index = 0;
  std::string game;

  std::size_t token_count() const;
};

// Number of whitespace-separated tokens.
std::size_t count_tokens(std::string_view text);

struct Warning {
  std::string extractor;  // "suggested_moves", "commentary_type", ...
  std::string message;

  bool operator==(const Warning&) const = default;
};

// ---- length -------------------------------------------------------------

struct LengthCutoffs {
  std::size_t short_max = 7;    // count <= short_max is short
  std::size_t medium_max = 20;  // count > medium_max is long
};

LengthClass length_class(std::size_t token_count, const LengthCutoffs& cutoffs = {});
LengthClass tag_length(const Commentary& c, const LengthCutoffs& cutoffs = {});

// ---- move quality -------------------------------------------------------

// Quality marker at the very start of `text` (after leading whitespace),
// longest match first. The second member is the marker length.
std::optional<std::pair<MoveQuality, std::size_t>> leading_marker(std::string_view text);

std::optional<MoveQuality> extract_move_quality_text(const Commentary& c);

// ---- commentary type ----------------------------------------------------

struct TypeScore {
  CommentaryType type = CommentaryType::General;
  double confidence = 0.0;
};

// External classifier. `task` is "commentary_type"; an empty label or one
// that does not name a category means "no opinion".
class TextClassifier {
 public:
  struct Label {
    std::string label;
    double confidence = 0.0;
  };

  virtual ~TextClassifier() = default;
  virtual Label classify(std::string_view task, std::string_view text) const = 0;
};

// Cue-lexicon scorer; falls back to General when no cue fires.
TypeScore rule_commentary_type(std::string_view text);
TypeScore extract_commentary_type(const Commentary& c, const TextClassifier* classifier = nullptr,
                                  std::vector<Warning>* warnings = nullptr);

// ---- suggested moves ----------------------------------------------------

// Loose SAN shape: accepts off-board squares such as "Ke9" so that they can
// be reported instead of silently ignored.
bool san_shaped(std::string_view token);

// Runs of SAN-shaped tokens (move numbers inside a run are skipped; a
// trailing comma, semicolon or period closes the run). Each run is checked
// for sequential legality from `anchor`; failing runs are dropped with a
// warning. Moves in returned lines are in canonical SAN.
std::optional<std::vector<SuggestedLine>> extract_suggested_moves(
    const Commentary& c, const chess::BoardState& anchor, std::vector<Warning>* warnings = nullptr);

// Raw SAN-shaped runs before validation, exposed for the grounding checker.
struct SanRun {
  std::vector<std::string> tokens;  // glyphs and punctuation stripped
  std::size_t offset = 0;           // byte span in the source text
  std::size_t length = 0;
};
std::vector<SanRun> find_san_runs(std::string_view text);

// ---- entities -----------------------------------------------------------

class AllowList {
 public:
  AllowList() = default;
  explicit AllowList(const std::vector<std::string>& phrases);

  // Seeded opening names (identical to data/allow_list.txt).
  static const AllowList& builtin();
  static const std::vector<std::string>& builtin_phrases();
  // One phrase per line; blank lines and lines starting with '#' ignored.
  static AllowList load(const std::filesystem::path& path);

  // Length in words of the longest phrase starting at words[i], else 0.
  // Comparison is case-insensitive and ignores a trailing possessive.
  std::size_t match(const std::vector<std::string>& words, std::size_t i) const;
  std::size_t size() const { return phrases_.size(); }

 private:
  std::vector<std::vector<std::string>> phrases_;
};

struct Entities {
  std::vector<std::string> pronouns;
  std::vector<std::string> proper_nouns;

  bool operator==(const Entities&) const = default;
};

class EntityRecognizer {
 public:
  virtual ~EntityRecognizer() = default;
  virtual Entities recognize(std::string_view text) const = 0;
};

bool is_pronoun(std::string_view word);

Entities extract_entities(const Commentary& c, const AllowList& allow = AllowList::builtin(),
                          const EntityRecognizer* recognizer = nullptr);

// ---- all together -------------------------------------------------------

struct ExtractorSet {
  const TextClassifier* classifier = nullptr;
  const EntityRecognizer* recognizer = nullptr;
  const AllowList* allow_list = nullptr;  // builtin when null
  LengthCutoffs cutoffs;
};

struct Annotation {
  TagSet tags;
  double type_confidence = 0.0;
  std::vector<Warning> warnings;
};

// `anchor` is the position before the commented move; suggestions are
// alternatives to it. Empty commentary gets no commentary type.
Annotation annotate(const Commentary& c, const chess::BoardState& anchor,
                    const ExtractorSet& extractors = {});

}  // namespace chesscomm::tags
