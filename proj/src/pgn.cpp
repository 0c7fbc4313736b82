#include "chesscomm/pgn.hpp"

#include <cctype>

namespace chesscomm::chess {

namespace {

bool is_result_token(std::string_view t) {
  return t == "1-0" || t == "0-1" || t == "1/2-1/2" || t == "*";
}

GameResult result_from(std::string_view t) {
  if (t == "1-0") return GameResult::WhiteWins;
  if (t == "0-1") return GameResult::BlackWins;
  if (t == "1/2-1/2") return GameResult::Draw;
  return GameResult::Unknown;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

  char get() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  // Whitespace and "%" escape lines.
  void skip_space() {
    while (!eof()) {
      const char c = peek();
      if (c == '%' && column_ == 1) {
        while (!eof() && peek() != '\n') get();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        get();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& reason) const {
    throw PgnSyntax(line_, column_, reason);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

bool token_delimiter(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '{' || c == '}' || c == '(' ||
         c == ')' || c == ';' || c == '$' || c == '[' || c == ']';
}

void parse_header(Lexer& lx, GameRecord& game) {
  lx.get();  // '['
  lx.skip_space();
  std::string key;
  while (!lx.eof() && (std::isalnum(static_cast<unsigned char>(lx.peek())) || lx.peek() == '_')) {
    key += lx.get();
  }
  if (key.empty()) lx.fail("header tag name expected");
  lx.skip_space();
  if (lx.peek() != '"') lx.fail("header value must be a quoted string");
  lx.get();
  std::string value;
  for (;;) {
    if (lx.eof()) lx.fail("unterminated header value");
    char c = lx.get();
    if (c == '\\' && !lx.eof() && (lx.peek() == '"' || lx.peek() == '\\')) {
      value += lx.get();
      continue;
    }
    if (c == '"') break;
    value += c;
  }
  lx.skip_space();
  if (lx.peek() != ']') lx.fail("']' expected after header value");
  lx.get();
  game.headers.emplace_back(std::move(key), std::move(value));
}

std::string read_variation(Lexer& lx) {
  std::string raw;
  int depth = 0;
  for (;;) {
    if (lx.eof()) lx.fail("unterminated variation");
    const char c = lx.get();
    raw += c;
    if (c == '{') {
      for (;;) {
        if (lx.eof()) lx.fail("unterminated comment inside variation");
        const char d = lx.get();
        raw += d;
        if (d == '}') break;
      }
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (--depth == 0) return raw;
    }
  }
}

// Parses one game starting at the lexer's position. Returns false when only
// whitespace remained.
bool parse_game(Lexer& lx, GameRecord& game) {
  lx.skip_space();
  if (lx.eof()) return false;
  while (lx.peek() == '[') {
    const std::size_t line = lx.line();
    const std::size_t col = lx.column();
    parse_header(lx, game);
    if (game.headers.back().first == "FEN") {
      try {
        game.start = BoardState::from_fen(game.headers.back().second);
      } catch (const ChessError& e) {
        throw PgnSyntax(line, col, std::string("bad FEN header: ") + e.what());
      }
    }
    lx.skip_space();
  }

  BoardState board = game.start;
  auto current_notes = [&]() -> PlyAnnotation* {
    return game.annotations.empty() ? nullptr : &game.annotations.back();
  };
  bool terminated = false;
  while (!terminated) {
    lx.skip_space();
    if (lx.eof()) break;
    const char c = lx.peek();
    if (c == '[') {
      if (game.plies.empty() && game.leading_comments.empty()) lx.fail("unexpected '['");
      break;  // next game without a termination marker
    }
    if (c == '{') {
      lx.get();
      std::string body;
      for (;;) {
        if (lx.eof()) lx.fail("unterminated comment");
        const char d = lx.get();
        if (d == '}') break;
        body += d;
      }
      if (auto* notes = current_notes()) notes->comments.push_back(trim(body));
      else game.leading_comments.push_back(trim(body));
      continue;
    }
    if (c == ';') {
      std::string body;
      lx.get();
      while (!lx.eof() && lx.peek() != '\n') body += lx.get();
      if (auto* notes = current_notes()) notes->comments.push_back(trim(body));
      else game.leading_comments.push_back(trim(body));
      continue;
    }
    if (c == '(') {
      auto* notes = current_notes();
      if (!notes) lx.fail("variation before the first move");
      notes->variations.push_back(read_variation(lx));
      continue;
    }
    if (c == ')' || c == '}' || c == ']') lx.fail(std::string("unexpected '") + c + "'");
    if (c == '$') {
      std::string nag(1, lx.get());
      while (!lx.eof() && std::isdigit(static_cast<unsigned char>(lx.peek()))) nag += lx.get();
      if (nag.size() == 1) lx.fail("NAG without a number");
      auto* notes = current_notes();
      if (!notes) lx.fail("NAG before the first move");
      notes->nags.push_back(nag);
      continue;
    }

    const std::size_t line = lx.line();
    const std::size_t col = lx.column();
    std::string token;
    while (!lx.eof() && !token_delimiter(lx.peek())) token += lx.get();

    if (is_result_token(token)) {
      game.result = result_from(token);
      terminated = true;
      continue;
    }
    // Move number prefix: "12." / "12..." optionally glued to the SAN.
    std::size_t i = 0;
    while (i < token.size() && std::isdigit(static_cast<unsigned char>(token[i]))) ++i;
    if (i > 0 && i < token.size() && token[i] == '.') {
      while (i < token.size() && token[i] == '.') ++i;
      token.erase(0, i);
      if (token.empty()) continue;
    } else if (i == token.size()) {
      continue;  // bare move number without dot
    }
    if (token.find_first_not_of("!?") == std::string::npos) {
      auto* notes = current_notes();
      if (!notes) throw PgnSyntax(line, col, "annotation glyph before the first move");
      notes->nags.push_back(token);
      continue;
    }

    MoveRecord move;
    const std::size_t ply = game.plies.size() + 1;
    try {
      move = parse_san(board, token);
    } catch (const UnparseableSan& e) {
      throw PgnSyntax(line, col, e.what());
    } catch (const ChessError& e) {
      throw IllegalMove("ply " + std::to_string(ply) + ": " + e.what(), ply);
    }
    board = apply_move(board, move);
    game.plies.push_back(std::move(move));
    game.annotations.emplace_back();
  }
  if (!terminated) {
    if (const std::string* r = game.header("Result"); r && is_result_token(*r)) {
      game.result = result_from(*r);
    }
  }
  return true;
}

std::string escape_header(std::string_view v) {
  std::string out;
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string move_number(int fullmove, Color side) {
  return std::to_string(fullmove) + (side == Color::White ? "." : "...");
}

}  // namespace

std::string_view result_text(GameResult r) {
  switch (r) {
    case GameResult::WhiteWins: return "1-0";
    case GameResult::BlackWins: return "0-1";
    case GameResult::Draw: return "1/2-1/2";
    case GameResult::Unknown: break;
  }
  return "*";
}

void GameRecord::push(const MoveRecord& move) {
  const BoardState before = final_position();
  try {
    apply_move(before, move);
  } catch (const IllegalMove& e) {
    throw IllegalMove(e.what(), plies.size() + 1);
  }
  plies.push_back(move);
  annotations.emplace_back();
}

BoardState GameRecord::position_after(std::size_t ply_count) const {
  BoardState b = start;
  for (std::size_t i = 0; i < ply_count && i < plies.size(); ++i) {
    try {
      b = apply_move(b, plies[i]);
    } catch (const IllegalMove& e) {
      throw IllegalMove(e.what(), i + 1);
    }
  }
  return b;
}

const std::string* GameRecord::header(std::string_view key) const {
  for (const auto& [k, v] : headers) {
    if (k == key) return &v;
  }
  return nullptr;
}

GameRecord parse_pgn(std::string_view text) {
  Lexer lx(text);
  GameRecord game;
  if (!parse_game(lx, game)) {
    // An empty document is an empty game, not an error.
    return game;
  }
  return game;
}

std::vector<GameRecord> parse_pgn_games(std::string_view text) {
  Lexer lx(text);
  std::vector<GameRecord> games;
  for (;;) {
    GameRecord game;
    if (!parse_game(lx, game)) break;
    games.push_back(std::move(game));
  }
  return games;
}

std::string numbered_movetext(const GameRecord& game) {
  std::string out;
  BoardState board = game.start;
  int fullmove = board.fullmove_number();
  Color side = board.side_to_move();
  for (std::size_t i = 0; i < game.plies.size(); ++i) {
    if (!out.empty()) out += ' ';
    if (side == Color::White || i == 0) out += move_number(fullmove, side) + ' ';
    out += game.plies[i].san;
    if (side == Color::Black) ++fullmove;
    side = opposite(side);
  }
  return out;
}

std::string render_pgn(const GameRecord& game) {
  std::string out;
  for (const auto& [k, v] : game.headers) out += "[" + k + " \"" + escape_header(v) + "\"]\n";
  if (!game.headers.empty()) out += '\n';

  std::string moves;
  auto append = [&](const std::string& piece) {
    if (!moves.empty()) moves += ' ';
    moves += piece;
  };
  for (const auto& c : game.leading_comments) append("{" + c + "}");
  int fullmove = game.start.fullmove_number();
  Color side = game.start.side_to_move();
  bool need_number = true;
  for (std::size_t i = 0; i < game.plies.size(); ++i) {
    if (side == Color::White || need_number) append(move_number(fullmove, side));
    const std::string san = game.plies[i].san + game.plies[i].annotation;
    moves += (moves.empty() || moves.back() == ' ' ? "" : " ") + san;
    const PlyAnnotation& notes = game.annotations.at(i);
    need_number = !notes.comments.empty() || !notes.nags.empty() || !notes.variations.empty();
    for (const auto& n : notes.nags) append(n);
    for (const auto& c : notes.comments) append("{" + c + "}");
    for (const auto& v : notes.variations) append(v);
    if (side == Color::Black) ++fullmove;
    side = opposite(side);
  }
  append(std::string(result_text(game.result)));
  out += moves + '\n';
  return out;
}

}  // namespace chesscomm::chess
