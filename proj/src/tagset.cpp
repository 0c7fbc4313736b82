#include "chesscomm/tagset.hpp"

#include <algorithm>
#include <cctype>

namespace chesscomm {

namespace {

// Lowercase, with spaces, slashes and dashes folded to '_'.
std::string fold(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '/' || c == '-') out += '_';
    else out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

std::string_view to_string(CommentaryType t) {
  switch (t) {
    case CommentaryType::MoveDescription: return "Move Description";
    case CommentaryType::MoveQuality: return "Move Quality";
    case CommentaryType::MoveComparison: return "Move Comparison";
    case CommentaryType::PlanningRationale: return "Planning/Rationale";
    case CommentaryType::Contextual: return "Contextual";
    case CommentaryType::General: return "General";
  }
  return "General";
}

std::string_view to_string(MoveQuality q) {
  switch (q) {
    case MoveQuality::Excellent: return "Excellent";
    case MoveQuality::Good: return "Good";
    case MoveQuality::Inaccuracy: return "Inaccuracy";
    case MoveQuality::Mistake: return "Mistake";
    case MoveQuality::Blunder: return "Blunder";
  }
  return "Good";
}

std::string_view to_string(LengthClass l) {
  switch (l) {
    case LengthClass::Short: return "short";
    case LengthClass::Medium: return "medium";
    case LengthClass::Long: return "long";
  }
  return "medium";
}

std::optional<CommentaryType> parse_commentary_type(std::string_view text) {
  const std::string key = fold(text);
  for (CommentaryType t : kAllCommentaryTypes) {
    if (fold(to_string(t)) == key) return t;
  }
  if (key == "comparative") return CommentaryType::MoveComparison;
  if (key == "planning" || key == "rationale" || key == "planning_rationale") {
    return CommentaryType::PlanningRationale;
  }
  return std::nullopt;
}

std::optional<MoveQuality> parse_move_quality(std::string_view text) {
  const std::string key = fold(text);
  for (MoveQuality q : kAllQualities) {
    if (fold(to_string(q)) == key) return q;
  }
  return std::nullopt;
}

std::optional<LengthClass> parse_length_class(std::string_view text) {
  const std::string key = fold(text);
  for (LengthClass l : {LengthClass::Short, LengthClass::Medium, LengthClass::Long}) {
    if (to_string(l) == key) return l;
  }
  return std::nullopt;
}

std::string_view quality_marker(MoveQuality q) {
  switch (q) {
    case MoveQuality::Excellent: return "!!";
    case MoveQuality::Good: return "!";
    case MoveQuality::Inaccuracy: return "!?";
    case MoveQuality::Mistake: return "?";
    case MoveQuality::Blunder: return "??";
  }
  return "";
}

}  // namespace chesscomm
