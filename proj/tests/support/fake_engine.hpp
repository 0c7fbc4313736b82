#pragma once

// Deterministic stand-in for a UCI engine: a two-ply material search that
// speaks enough UCI for the adapter (uci, isready, setoption, ucinewgame,
// position fen, go, stop, quit). Used in-process through SyntheticTransport
// and out-of-process by the fake_uci_engine executable.

#include <deque>
#include <string>
#include <string_view>
#include <vector>

#include "chesscomm/chess.hpp"
#include "chesscomm/engine.hpp"

namespace fake {

struct ScoredMove {
  chesscomm::chess::MoveRecord move;
  std::string reply_uci;  // empty when the move ends the game
  int cp = 0;
  int mate = 0;  // +1: the move mates; -1: the best reply mates
};

// All legal moves scored from the mover's side, best first (ties by UCI
// string).
std::vector<ScoredMove> score_moves(const chesscomm::chess::BoardState& board);

class SyntheticEngine {
 public:
  // Output lines produced in response to one input line.
  std::vector<std::string> handle(std::string_view line);
  bool quit() const { return quit_; }

 private:
  chesscomm::chess::BoardState board_ = chesscomm::chess::BoardState::initial();
  int multipv_ = 1;
  bool wdl_ = false;
  bool quit_ = false;
};

class SyntheticTransport : public chesscomm::engine::Transport {
 public:
  void send(std::string_view line) override;
  Read read_line(std::chrono::milliseconds timeout) override;

 private:
  SyntheticEngine engine_;
  std::deque<std::string> out_;
};

}  // namespace fake
