#include "chesscomm/representation.hpp"

#include <algorithm>
#include <sstream>

namespace chesscomm::repr {

namespace {

using chess::BoardState;

std::string sentinel(Segment s) { return "[" + std::string(segment_name(s)) + "]"; }

std::string piece_token(const chess::PlacedPiece& p) {
  return std::string(1, chess::piece_letter(p.piece.kind)) + "_" + p.square.name();
}

std::string join(const std::vector<std::string>& parts, std::string_view sep = " ") {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(' ');
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(' ');
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::Unconditioned: return "unconditioned";
    case Ablation::MoveOnly: return "move";
    case Ablation::GameState: return "game-state";
    case Ablation::WithTags: return "tags";
    case Ablation::Fully: return "fully";
  }
  return "fully";
}

std::optional<Ablation> parse_ablation(std::string_view text) {
  if (text == "unconditioned") return Ablation::Unconditioned;
  if (text == "move" || text == "move-only") return Ablation::MoveOnly;
  if (text == "game-state" || text == "game_state") return Ablation::GameState;
  if (text == "tags" || text == "with-tags" || text == "with_tags") return Ablation::WithTags;
  if (text == "fully") return Ablation::Fully;
  return std::nullopt;
}

RepresentationConfig RepresentationConfig::unconditioned() {
  RepresentationConfig c;
  c.ablation = Ablation::Unconditioned;
  return c;
}

RepresentationConfig RepresentationConfig::move_only() {
  RepresentationConfig c;
  c.ablation = Ablation::MoveOnly;
  return c;
}

RepresentationConfig RepresentationConfig::game_state(SegmentToggles segments) {
  RepresentationConfig c;
  c.ablation = Ablation::GameState;
  c.segments = segments;
  return c;
}

RepresentationConfig RepresentationConfig::with_tags(TagFamilies tags) {
  RepresentationConfig c;
  c.ablation = Ablation::WithTags;
  c.tags = tags;
  return c;
}

RepresentationConfig RepresentationConfig::fully() { return RepresentationConfig{}; }

SegmentToggles RepresentationConfig::effective_segments() const {
  switch (ablation) {
    case Ablation::Unconditioned:
    case Ablation::MoveOnly: return {false, false, false};
    case Ablation::GameState: return segments;
    case Ablation::WithTags:
    case Ablation::Fully: break;
  }
  return {};
}

TagFamilies RepresentationConfig::effective_tags() const {
  switch (ablation) {
    case Ablation::WithTags: return tags;
    case Ablation::Fully: return {};
    default: return TagFamilies::none();
  }
}

std::string_view segment_name(Segment s) {
  switch (s) {
    case Segment::Pgn: return "PGN";
    case Segment::Pieces: return "PIECES";
    case Segment::Attacks: return "ATTACKS";
    case Segment::Move: return "MOVE";
    case Segment::Tags: return "TAGS";
  }
  return "";
}

std::string_view InputText::segment(Segment s) const {
  const auto it = segment_spans.find(s);
  if (it == segment_spans.end()) return {};
  return std::string_view(text).substr(it->second.offset, it->second.length);
}

std::string render_pieces(const BoardState& board) {
  std::vector<std::string> parts;
  for (const auto& p : chess::listed_pieces(board)) {
    parts.push_back(std::string(chess::color_name(p.piece.color)) + " " + piece_token(p));
  }
  return join(parts);
}

std::string render_attacks(const BoardState& board, chess::AttackMode mode) {
  std::vector<std::string> parts;
  for (const auto& r : chess::attack_relations(board, mode)) {
    parts.push_back(std::string(chess::color_name(r.attacker.piece.color)) + " " +
                    piece_token(r.attacker) + "$" + piece_token(r.target));
  }
  return join(parts);
}

std::vector<SegmentText> render_game_state(const chess::GameRecord& record,
                                           const BoardState& board,
                                           const RepresentationConfig& config) {
  if (!chess::same_position(record.final_position(), board)) {
    throw InconsistentState("board " + board.fen() + " is not the position after replaying " +
                            std::to_string(record.plies.size()) + " plies");
  }
  const SegmentToggles on = config.effective_segments();
  std::vector<SegmentText> out;
  if (on.pgn) out.push_back({Segment::Pgn, chess::numbered_movetext(record)});
  if (on.pieces) out.push_back({Segment::Pieces, render_pieces(board)});
  if (on.attacks) out.push_back({Segment::Attacks, render_attacks(board, config.attack_mode)});
  return out;
}

std::string render_tags(const TagSet& tags, const TagFamilies& families) {
  std::vector<std::string> parts;
  if (families.commentary_type && tags.commentary_type) {
    parts.push_back("[Commentary Type] " + std::string(to_string(*tags.commentary_type)));
  }
  if (families.move_quality && tags.move_quality) {
    parts.push_back("[Move Quality] " + std::string(to_string(*tags.move_quality)));
  }
  if (families.suggested_move && tags.suggested) {
    for (const auto& line : *tags.suggested) {
      if (!line.moves.empty()) parts.push_back("[Suggested Move] " + join(line.moves));
    }
  }
  if (families.pronoun) {
    for (const auto& p : tags.pronouns) parts.push_back("[Pronoun] " + p);
  }
  if (families.proper_noun) {
    for (const auto& p : tags.proper_nouns) parts.push_back("[Proper Noun] " + p);
  }
  if (families.length && tags.length) {
    parts.push_back("[" + std::string(to_string(*tags.length)) + "]");
  }
  return join(parts);
}

InputText assemble_input(const std::vector<SegmentText>& segments, const chess::MoveRecord& move,
                         const TagSet& tags, const RepresentationConfig& config) {
  InputText out;
  if (config.ablation == Ablation::Unconditioned) {
    out.text = "[Unconditioned]";
    return out;
  }
  if (config.ablation == Ablation::MoveOnly) {
    out.text = move.san;
    out.segment_spans[Segment::Move] = {0, move.san.size()};
    return out;
  }

  std::vector<SegmentText> ordered = segments;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const SegmentText& a, const SegmentText& b) { return a.segment < b.segment; });

  out.text = "[" + config.scheme + "]";
  auto append = [&](Segment s, const std::string& body) {
    out.text += ' ' + sentinel(s);
    if (!body.empty()) out.text += ' ';
    out.segment_spans[s] = {out.text.size(), body.size()};
    out.text += body;
  };
  for (const auto& seg : ordered) {
    if (seg.segment == Segment::Move || seg.segment == Segment::Tags) continue;
    append(seg.segment, seg.text);
  }
  append(Segment::Move, move.san);
  const std::string rendered = render_tags(tags, config.effective_tags());
  if (!rendered.empty()) {
    out.text += ' ';
    out.segment_spans[Segment::Tags] = {out.text.size(), rendered.size()};
    out.text += rendered;
  }
  return out;
}

InputText render_input(const chess::GameRecord& record, const BoardState& board,
                       const chess::MoveRecord& move, const TagSet& tags,
                       const RepresentationConfig& config) {
  return assemble_input(render_game_state(record, board, config), move, tags, config);
}

SplitInput split_input(std::string_view text) {
  SplitInput out;
  if (text == "[Unconditioned]") {
    out.unconditioned = true;
    return out;
  }
  if (text.empty()) throw MalformedInput("empty input text");
  if (text.front() != '[') {
    if (text.find(' ') != std::string_view::npos) {
      throw MalformedInput("move-only input must be a single token");
    }
    out.segments.push_back({Segment::Move, std::string(text)});
    return out;
  }
  const auto close = text.find(']');
  if (close == std::string_view::npos) throw MalformedInput("unterminated scheme tag");
  out.scheme = std::string(text.substr(1, close - 1));
  if (*out.scheme != kSchemeV1) throw MalformedInput("unknown scheme '" + *out.scheme + "'");

  std::size_t pos = close + 1;
  const Segment order[] = {Segment::Pgn, Segment::Pieces, Segment::Attacks, Segment::Move};
  std::vector<std::pair<Segment, std::size_t>> found;  // segment, sentinel start
  std::size_t cursor = pos;
  for (Segment s : order) {
    const std::string tag = " " + sentinel(s);
    const auto at = text.find(tag, cursor);
    if (at == std::string_view::npos) continue;
    found.emplace_back(s, at);
    cursor = at + tag.size();
  }
  if (found.empty() || found.back().first != Segment::Move) {
    throw MalformedInput("input has no [MOVE] segment");
  }
  if (found.front().second != pos) throw MalformedInput("unexpected text before first segment");
  for (std::size_t i = 0; i < found.size(); ++i) {
    const auto [seg, at] = found[i];
    const std::size_t body_start = at + 1 + sentinel(seg).size();
    if (seg != Segment::Move) {
      const std::size_t end = found[i + 1].second;
      out.segments.push_back({seg, trim(text.substr(body_start, end - body_start))});
      continue;
    }
    std::string rest = trim(text.substr(body_start));
    const auto space = rest.find(' ');
    out.segments.push_back({Segment::Move, rest.substr(0, space)});
    if (space != std::string::npos) {
      out.segments.push_back({Segment::Tags, trim(std::string_view(rest).substr(space + 1))});
    }
  }
  return out;
}

TagSet parse_tags(std::string_view text) {
  TagSet tags;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == ' ') {
      ++pos;
      continue;
    }
    if (text[pos] != '[') throw MalformedInput("tag expected at offset " + std::to_string(pos));
    const auto close = text.find(']', pos);
    if (close == std::string_view::npos) throw MalformedInput("unterminated tag");
    const std::string family(text.substr(pos + 1, close - pos - 1));
    auto next = text.find(" [", close);
    if (next == std::string_view::npos) next = text.size();
    const std::string value = trim(text.substr(close + 1, next - close - 1));
    pos = next;

    if (const auto len = parse_length_class(family); len && family == to_string(*len)) {
      tags.length = len;
    } else if (family == "Commentary Type") {
      tags.commentary_type = parse_commentary_type(value);
      if (!tags.commentary_type) throw MalformedInput("unknown commentary type '" + value + "'");
    } else if (family == "Move Quality") {
      tags.move_quality = parse_move_quality(value);
      if (!tags.move_quality) throw MalformedInput("unknown move quality '" + value + "'");
    } else if (family == "Suggested Move") {
      SuggestedLine line;
      std::istringstream in(value);
      for (std::string san; in >> san;) line.moves.push_back(san);
      if (!tags.suggested) tags.suggested.emplace();
      tags.suggested->push_back(std::move(line));
    } else if (family == "Pronoun") {
      tags.pronouns.push_back(value);
    } else if (family == "Proper Noun") {
      tags.proper_nouns.push_back(value);
    } else {
      throw MalformedInput("unknown tag family '" + family + "'");
    }
  }
  return tags;
}

}  // namespace chesscomm::repr
