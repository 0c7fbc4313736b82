#pragma once

// Control tags attached to a commentary: the vocabulary shared by tag
// extraction (training data), the engine adapter (inference) and the input
// representation.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chesscomm/chess.hpp"

namespace chesscomm {

enum class CommentaryType {
  MoveDescription,
  MoveQuality,
  MoveComparison,
  PlanningRationale,
  Contextual,
  General,
};

inline constexpr CommentaryType kAllCommentaryTypes[] = {
    CommentaryType::MoveDescription, CommentaryType::MoveQuality,
    CommentaryType::MoveComparison,  CommentaryType::PlanningRationale,
    CommentaryType::Contextual,      CommentaryType::General};

// Ordered best to worst.
enum class MoveQuality { Excellent, Good, Inaccuracy, Mistake, Blunder };

inline constexpr MoveQuality kAllQualities[] = {
    MoveQuality::Excellent, MoveQuality::Good, MoveQuality::Inaccuracy,
    MoveQuality::Mistake, MoveQuality::Blunder};

enum class LengthClass { Short, Medium, Long };

// "Move Description", "Planning/Rationale", ...
std::string_view to_string(CommentaryType t);
// "Excellent", "Good", ...
std::string_view to_string(MoveQuality q);
// "short", "medium", "long"
std::string_view to_string(LengthClass l);

// Accepts the display names above, case-insensitively, plus snake_case ids
// such as "move_quality" or "planning_rationale".
std::optional<CommentaryType> parse_commentary_type(std::string_view text);
std::optional<MoveQuality> parse_move_quality(std::string_view text);
std::optional<LengthClass> parse_length_class(std::string_view text);

// "!!", "!", "!?", "?", "??"
std::string_view quality_marker(MoveQuality q);

// Reserved; extraction never sets it.
enum class SuggestionPolarity { Better, Inferior };

struct SuggestedLine {
  std::vector<std::string> moves;  // SAN, sequentially legal from anchor
  chess::BoardState anchor;
  std::optional<SuggestionPolarity> polarity;

  bool operator==(const SuggestedLine&) const = default;
};

struct TagSet {
  std::optional<CommentaryType> commentary_type;
  std::optional<MoveQuality> move_quality;
  std::optional<std::vector<SuggestedLine>> suggested;
  std::vector<std::string> pronouns;
  std::vector<std::string> proper_nouns;
  std::optional<LengthClass> length;

  bool operator==(const TagSet&) const = default;
};

}  // namespace chesscomm
