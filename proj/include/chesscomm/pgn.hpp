#pragma once

// PGN import/export for single games and game collections.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chesscomm/chess.hpp"

namespace chesscomm::chess {

class PgnSyntax : public ChessError {
 public:
  PgnSyntax(std::size_t line, std::size_t column, const std::string& reason)
      : ChessError("PGN syntax error at " + std::to_string(line) + ":" +
                   std::to_string(column) + ": " + reason),
        line_(line),
        column_(column),
        reason_(reason) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string reason_;
};

enum class GameResult { WhiteWins, BlackWins, Draw, Unknown };

std::string_view result_text(GameResult r);  // "1-0", "0-1", "1/2-1/2", "*"

// Everything attached to one ply in the movetext besides the move itself.
// Comments are the commentary candidates; NAGs and variations are kept as
// raw text and otherwise ignored.
struct PlyAnnotation {
  std::vector<std::string> comments;
  std::vector<std::string> nags;
  std::vector<std::string> variations;

  bool operator==(const PlyAnnotation&) const = default;
};

struct GameRecord {
  std::vector<std::pair<std::string, std::string>> headers;
  BoardState start = BoardState::initial();
  std::vector<MoveRecord> plies;
  std::vector<PlyAnnotation> annotations;  // parallel to plies
  std::vector<std::string> leading_comments;
  GameResult result = GameResult::Unknown;

  // Appends a legal move; throws IllegalMove (with ply number) otherwise.
  void push(const MoveRecord& move);
  // Position after the first `ply_count` plies.
  BoardState position_after(std::size_t ply_count) const;
  BoardState final_position() const { return position_after(plies.size()); }
  const std::string* header(std::string_view key) const;
};

// Parses the first game in `text`. Throws PgnSyntax or IllegalMove (the
// latter carrying the 1-based ply number).
GameRecord parse_pgn(std::string_view text);
// Parses every game in `text`.
std::vector<GameRecord> parse_pgn_games(std::string_view text);

// Export-format text. parse_pgn(render_pgn(g)) reproduces g.
std::string render_pgn(const GameRecord& game);

// Numbered SAN movetext without comments or result, e.g. "1. e4 e5 2. Nf3".
// Starts with "N..." when the first ply is Black's.
std::string numbered_movetext(const GameRecord& game);

}  // namespace chesscomm::chess
