#include "chesscomm/inference.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "chesscomm/tags.hpp"
#include "json.hpp"

namespace chesscomm::inference {

using chess::BoardState;
using chess::MoveRecord;

InferenceRequest InferenceRequest::from_fen(std::string_view fen, std::string_view san,
                                            CommentaryType type, std::optional<LengthClass> length) {
  InferenceRequest r;
  try {
    r.game.start = BoardState::from_fen(fen);
    r.move = chess::parse_san(r.game.start, san);
  } catch (const chess::ChessError& e) {
    throw InvalidRequest(e.what());
  }
  r.type = type;
  r.length = length;
  return r;
}

PreparedInput build_inference_request(engine::EngineSession& session, const InferenceRequest& request) {
  const BoardState board = request.board();
  engine::TagRequest tr;
  tr.type = request.type;
  tr.want_suggestion = true;
  tr.length = request.length.value_or(LengthClass::Medium);
  PreparedInput out;
  out.derived = engine::derive_tags(session, board, request.move, tr);
  out.tags = out.derived.tags;
  out.tags.pronouns.clear();
  out.tags.proper_nouns.clear();
  out.tags.length = tr.length;
  out.input = repr::render_input(request.game, board, request.move, out.tags,
                                 repr::RepresentationConfig::fully());
  return out;
}

// ---- template realizer --------------------------------------------------

namespace {

std::string_view strip_check(std::string_view san) {
  while (!san.empty() && (san.back() == '+' || san.back() == '#')) san.remove_suffix(1);
  return san;
}

std::string quality_phrase(MoveQuality q) {
  switch (q) {
    case MoveQuality::Excellent: return "An excellent move.";
    case MoveQuality::Good: return "A good move.";
    case MoveQuality::Inaccuracy: return "An inaccuracy.";
    case MoveQuality::Mistake: return "A mistake.";
    case MoveQuality::Blunder: return "A blunder.";
  }
  return "";
}

// Compact forms keep short commentary within seven tokens.
std::string describe_move(const BoardState& board, const MoveRecord& m, bool compact = false) {
  const std::string color(chess::color_name(board.side_to_move()));
  if (m.flags.castle_king) return color + " castles kingside.";
  if (m.flags.castle_queen) return color + " castles queenside.";
  std::string piece(chess::piece_name(m.moving.kind));
  const std::string to = m.to.name();
  if (compact) {
    piece[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(piece[0])));
    if (m.promotion) return "Pawn promotes on " + to + ".";
    if (m.flags.en_passant) return "Pawn takes en passant.";
    if (m.capture) return piece + " takes on " + to + ".";
    return piece + " to " + to + ".";
  }
  if (m.promotion) return "The pawn promotes on " + to + ".";
  if (m.flags.en_passant) return "The pawn captures en passant.";
  if (m.capture)
    return "The " + piece + " takes the " + std::string(chess::piece_name(m.capture->kind)) + " on " + to + ".";
  return "The " + piece + " goes to " + to + ".";
}

int material(const BoardState& b, chess::Color c) {
  static constexpr int kValue[] = {1, 3, 3, 5, 9, 0};  // P N B R Q K
  int sum = 0;
  for (const auto& p : chess::listed_pieces(b))
    if (p.piece.color == c) sum += kValue[static_cast<int>(p.piece.kind)];
  return sum;
}

// Sentences that may be appended to reach a length class, in order.
std::vector<std::string> fillers(const BoardState& board, const MoveRecord& m, bool description_in_core) {
  const BoardState after = chess::apply_move(board, m);
  const chess::Color me = board.side_to_move();
  const std::string mine(chess::color_name(me));
  const std::string theirs(chess::color_name(chess::opposite(me)));
  std::vector<std::string> out;
  if (!description_in_core) out.push_back(describe_move(board, m));
  if (m.flags.mate) {
    out.push_back("This is checkmate.");
  } else if (chess::is_stalemate(after)) {
    out.push_back("The game ends in stalemate.");
  } else {
    if (m.flags.check) out.push_back("This gives check.");
    out.push_back(theirs + " now has " + std::to_string(chess::legal_moves(after).size()) +
                  " legal replies.");
  }
  const chess::PieceKind landed = m.promotion.value_or(m.moving.kind);
  const chess::Square where = m.flags.castle_king || m.flags.castle_queen
                                  ? *after.king_square(me)
                                  : m.to;
  out.push_back("The " + std::string(chess::piece_name(m.flags.castle_king || m.flags.castle_queen
                                                           ? chess::PieceKind::King
                                                           : landed)) +
                " now stands on " + where.name() + ".");
  out.push_back("Material stands at " + std::to_string(material(after, chess::Color::White)) + " for White and " +
                std::to_string(material(after, chess::Color::Black)) + " for Black.");
  std::size_t count = 0;
  for (const auto& p : chess::listed_pieces(after))
    if (p.piece.color == me) ++count;
  out.push_back(mine + " has " + std::to_string(count) + " pieces left on the board.");
  if (!m.flags.mate) out.push_back("It is now " + theirs + "'s turn to move.");
  out.push_back("Both sides will have to calculate carefully from here.");
  out.push_back("There is still plenty of play left in this position.");
  return out;
}

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!s.empty()) s += ' ';
    s += p;
  }
  return s;
}

}  // namespace

std::string realize_template(const TagSet& tags, const BoardState& board, const MoveRecord& move) {
  if (!tags.commentary_type) throw InvalidRequest("template realizer needs a commentary type");
  const CommentaryType type = *tags.commentary_type;
  std::optional<std::string> better;
  if (tags.suggested && !tags.suggested->empty() && !tags.suggested->front().moves.empty()) {
    const std::string& s = tags.suggested->front().moves.front();
    if (strip_check(s) != strip_check(move.san)) better = s;
  }

  const LengthClass length = tags.length.value_or(LengthClass::Medium);
  std::vector<std::string> core;
  bool description_in_core = false;
  switch (type) {
    case CommentaryType::MoveDescription:
      core.push_back(describe_move(board, move, length == LengthClass::Short));
      description_in_core = true;
      if (better) core.push_back("Better was " + *better + ".");
      break;
    case CommentaryType::MoveQuality:
      if (!tags.move_quality) throw InvalidRequest("Move Quality commentary needs a move quality tag");
      core.push_back(std::string(quality_marker(*tags.move_quality)) + " " + quality_phrase(*tags.move_quality));
      if (better) core.push_back("Better was " + *better + ".");
      break;
    case CommentaryType::MoveComparison:
      if (better) core.push_back(*better + " was better than " + move.san + ".");
      else core.push_back(move.san + " was the best move here.");
      break;
    default:
      throw NotSupported("the template realizer does not cover \"" + std::string(to_string(type)) +
                         "\" commentary");
  }

  const tags::LengthCutoffs cut;
  std::vector<std::string> parts = core;
  if (length != LengthClass::Short) {
    const std::size_t want = length == LengthClass::Medium ? cut.short_max + 1 : cut.medium_max + 1;
    for (const std::string& f : fillers(board, move, description_in_core)) {
      if (tags::count_tokens(join(parts)) >= want) break;
      parts.push_back(f);
    }
  }
  std::string text = join(parts);
  if (tags::length_class(tags::count_tokens(text), cut) != length)
    throw Error("template realizer missed the requested length for " + move.san);
  return text;
}

// ---- grounding ----------------------------------------------------------

std::string_view to_string(ViolationKind k) {
  return k == ViolationKind::IllegalSan ? "illegal-SAN" : "nonexistent-piece";
}

namespace {

// Index of the first token that fails, or nullopt when the run is legal.
std::optional<std::size_t> first_illegal(const std::vector<std::string>& tokens, BoardState b) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    try {
      b = chess::apply_move(b, chess::parse_san(b, tokens[i]));
    } catch (const chess::ChessError&) {
      return i;
    }
  }
  return std::nullopt;
}

bool holds(const BoardState& b, std::optional<chess::Color> color, chess::PieceKind kind, chess::Square sq) {
  const auto p = b.at(sq);
  return p && p->kind == kind && (!color || p->color == *color);
}

}  // namespace

GroundingReport ground_check(std::string_view text, const BoardState& board,
                             const std::optional<MoveRecord>& move) {
  GroundingReport report;
  std::optional<BoardState> after;
  if (move) after = chess::apply_move(board, *move);

  for (const tags::SanRun& run : tags::find_san_runs(text)) {
    const auto bad = first_illegal(run.tokens, board);
    if (!bad) continue;
    if (after && !first_illegal(run.tokens, *after)) continue;
    std::size_t length = run.length;
    while (length > 0 && std::string_view(".,;:)]\"'").find(text[run.offset + length - 1]) != std::string_view::npos)
      --length;
    report.violations.push_back({run.offset, length, ViolationKind::IllegalSan,
                                 run.tokens[*bad] + " is not legal" +
                                     (*bad ? " after " + run.tokens[*bad - 1] : std::string())});
  }

  static const std::regex claim(
      R"(\b(?:(white|black)(?:'s)?\s+)?(king|queen|rook|bishop|knight|pawn)s?\s+on\s+([a-h][1-8])\b)",
      std::regex::icase);
  const std::string s(text);
  for (std::sregex_iterator it(s.begin(), s.end(), claim), end; it != end; ++it) {
    const auto& m = *it;
    std::optional<chess::Color> color;
    if (m[1].matched) {
      const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(m[1].str()[0])));
      color = c == 'w' ? chess::Color::White : chess::Color::Black;
    }
    std::string name = m[2].str();
    for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    chess::PieceKind kind = chess::PieceKind::Pawn;
    for (auto k : chess::kAllKinds)
      if (chess::piece_name(k) == name) kind = k;
    std::string sq_text = m[3].str();
    sq_text[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(sq_text[0])));
    const chess::Square sq = *chess::Square::parse(sq_text);
    if (holds(board, color, kind, sq) || (after && holds(*after, color, kind, sq))) continue;
    report.violations.push_back({static_cast<std::size_t>(m.position(0)), static_cast<std::size_t>(m.length(0)),
                                 ViolationKind::NonexistentPiece,
                                 "no " + (color ? std::string(chess::color_name(*color)) + " " : std::string()) +
                                     name + " on " + sq_text});
  }
  std::sort(report.violations.begin(), report.violations.end(),
            [](const Violation& a, const Violation& b) { return a.offset < b.offset; });
  return report;
}

// ---- orchestration ------------------------------------------------------

InferenceResult infer(engine::EngineSession& session, const InferenceRequest& request,
                      const InferOptions& options) {
  InferenceResult r;
  r.prepared = build_inference_request(session, request);
  const BoardState board = request.board();
  if (!options.backend) {
    r.backend = "template";
    r.text = realize_template(r.prepared.tags, board, request.move);
    r.attempts = 1;
    r.report = ground_check(r.text, board, request.move);
    return r;
  }
  r.backend = "backend";
  const int attempts = std::max(1, options.max_attempts);
  for (int i = 0; i < attempts; ++i) {
    r.text = options.backend->generate(r.prepared.input.text, options.max_tokens);
    r.attempts = i + 1;
    r.report = ground_check(r.text, board, request.move);
    if (r.report.ok()) break;
  }
  return r;
}

std::string to_json(const InferenceResult& r) {
  using json = nlohmann::ordered_json;
  json j;
  j["input"] = r.prepared.input.text;
  j["tags"] = repr::render_tags(r.prepared.tags);
  j["text"] = r.text;
  j["backend"] = r.backend;
  j["attempts"] = r.attempts;
  const auto& d = r.prepared.derived;
  j["engine"] = {{"best_move", d.before.best_move.san},
                 {"p_best", d.p_best},
                 {"p_played", d.p_played},
                 {"delta", d.delta}};
  json v = json::array();
  for (const auto& x : r.report.violations)
    v.push_back({{"offset", x.offset}, {"length", x.length}, {"kind", std::string(to_string(x.kind))}, {"detail", x.detail}});
  j["violations"] = v;
  return j.dump();
}

}  // namespace chesscomm::inference
