#pragma once

// Serialization of (game state, move, tags) into the text input consumed by
// a commentary generator, including the ablation variants.
//
// Layout (scheme v1), segments omitted when disabled:
//
//   [v1] [PGN] 1. e4 e5 [PIECES] White K_e1 ... [ATTACKS] White B_b5$N_c6 ...
//        [MOVE] Nf3 [Commentary Type] Move Quality [Move Quality] Good [medium]
//
// The Unconditioned ablation is the single token "[Unconditioned]" and the
// move-only ablation is the bare SAN move. docs/format.md has the details.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chesscomm/chess.hpp"
#include "chesscomm/error.hpp"
#include "chesscomm/pgn.hpp"
#include "chesscomm/tagset.hpp"

namespace chesscomm::repr {

class InconsistentState : public Error {
 public:
  using Error::Error;
};

class MalformedInput : public Error {
 public:
  using Error::Error;
};

enum class Ablation { Unconditioned, MoveOnly, GameState, WithTags, Fully };

std::string_view to_string(Ablation a);  // "unconditioned", "move", ...
// Accepts "unconditioned", "move"/"move-only", "game-state", "tags"/"with-tags", "fully".
std::optional<Ablation> parse_ablation(std::string_view text);

struct SegmentToggles {
  bool pgn = true;
  bool pieces = true;
  bool attacks = true;

  bool operator==(const SegmentToggles&) const = default;
};

struct TagFamilies {
  bool commentary_type = true;
  bool move_quality = true;
  bool suggested_move = true;
  bool pronoun = true;
  bool proper_noun = true;
  bool length = true;

  static TagFamilies none() { return {false, false, false, false, false, false}; }
  bool operator==(const TagFamilies&) const = default;
};

inline constexpr std::string_view kSchemeV1 = "v1";

struct RepresentationConfig {
  Ablation ablation = Ablation::Fully;
  SegmentToggles segments;  // honored by GameState only
  TagFamilies tags;         // honored by WithTags only
  std::string scheme{kSchemeV1};
  chess::AttackMode attack_mode = chess::AttackMode::PseudoLegal;

  static RepresentationConfig unconditioned();
  static RepresentationConfig move_only();
  static RepresentationConfig game_state(SegmentToggles segments = {});
  static RepresentationConfig with_tags(TagFamilies tags = {});
  static RepresentationConfig fully();

  // What is actually emitted; Fully forces everything on.
  SegmentToggles effective_segments() const;
  TagFamilies effective_tags() const;
};

enum class Segment { Pgn, Pieces, Attacks, Move, Tags };

std::string_view segment_name(Segment s);  // "PGN", "PIECES", "ATTACKS", "MOVE", "TAGS"

struct SegmentText {
  Segment segment;
  std::string text;

  bool operator==(const SegmentText&) const = default;
};

struct Span {
  std::size_t offset = 0;
  std::size_t length = 0;

  bool operator==(const Span&) const = default;
};

struct InputText {
  std::string text;
  std::map<Segment, Span> segment_spans;

  std::string_view segment(Segment s) const;
  bool operator==(const InputText&) const = default;
};

// "White R_c5 White K_e1 ..." in listing order (colors White then Black,
// kinds K Q R B N P, squares file-major).
std::string render_pieces(const chess::BoardState& board);
// "White R_a1$P_a2 ..." in attack_relations order.
std::string render_attacks(const chess::BoardState& board,
                           chess::AttackMode mode = chess::AttackMode::PseudoLegal);

// Enabled game-state segments for `config`, in PGN, PIECES, ATTACKS order.
// Throws InconsistentState when `board` is not the position reached by
// replaying `record`.
std::vector<SegmentText> render_game_state(const chess::GameRecord& record,
                                           const chess::BoardState& board,
                                           const RepresentationConfig& config);

// "[<Family>] <value>" entries in the fixed family order Commentary Type,
// Move Quality, Suggested Move, Pronoun, Proper Noun, Length; absent tags
// and disabled families are omitted.
std::string render_tags(const TagSet& tags, const TagFamilies& families = {});

InputText assemble_input(const std::vector<SegmentText>& segments, const chess::MoveRecord& move,
                         const TagSet& tags, const RepresentationConfig& config);

// render_game_state + assemble_input.
InputText render_input(const chess::GameRecord& record, const chess::BoardState& board,
                       const chess::MoveRecord& move, const TagSet& tags,
                       const RepresentationConfig& config);

struct SplitInput {
  bool unconditioned = false;
  std::optional<std::string> scheme;
  std::vector<SegmentText> segments;  // includes MOVE and, when present, TAGS
};

// Inverse of assemble_input. Throws MalformedInput.
SplitInput split_input(std::string_view text);

// Inverse of render_tags. Suggested lines come back without anchors.
// Throws MalformedInput on unknown families.
TagSet parse_tags(std::string_view text);

}  // namespace chesscomm::repr
