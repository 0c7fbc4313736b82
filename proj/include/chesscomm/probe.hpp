#pragma once

// Prompted belief states: for a piece-location prompt such as
// "White's bishop on ", score all 64 square names as continuations under a
// likelihood oracle and normalize the result into a distribution.

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chesscomm/backend.hpp"
#include "chesscomm/chess.hpp"
#include "chesscomm/error.hpp"
#include "chesscomm/pgn.hpp"
#include "chesscomm/representation.hpp"

namespace chesscomm::probe {

class IoFailure : public Error {
 public:
  using Error::Error;
};

struct ProbePrompt {
  chess::Color color = chess::Color::White;
  chess::PieceKind kind = chess::PieceKind::Pawn;
  std::string text;  // ends with a space; a square name follows

  bool operator==(const ProbePrompt&) const = default;
};

// One template per (color, kind). The defaults read "White's bishop on ".
class TemplateSet {
 public:
  TemplateSet();

  const std::string& get(chess::Color color, chess::PieceKind kind) const;
  // Throws Error unless `text` is non-empty and ends with a space.
  void set(chess::Color color, chess::PieceKind kind, std::string text);

 private:
  std::map<std::pair<chess::Color, chess::PieceKind>, std::string> templates_;
};

// One prompt per (color, kind) present on the board: White before Black,
// kinds in K, Q, R, B, N, P order.
std::vector<ProbePrompt> build_prompts(const chess::BoardState& board, const TemplateSet& templates = {});

// The 64 continuations in square index order: "a1", "b1", ..., "h8".
const std::vector<std::string>& square_tokens();

// "[v1] [PGN] ... [PIECES] ... [ATTACKS] ..." for the enabled segments.
// Throws repr::InconsistentState when `board` is not reached by `record`.
std::string probe_context(const chess::GameRecord& record, const chess::BoardState& board,
                          const repr::SegmentToggles& segments = {});

struct BeliefState {
  std::array<double, 64> distribution{};  // by Square::index()
  ProbePrompt prompt;
  std::vector<chess::Square> valid_squares;  // file-major

  double weight_on_valid() const;
  // Highest-probability square; ties go to the earliest square file-major.
  chess::Square argmax() const;
  bool argmax_valid() const;
};

// Scores context + " " + prompt text (just the prompt text when the context
// is empty). Throws backend::NonFiniteScore for NaN/inf log-probabilities,
// backend::MalformedResponse when the oracle does not return 64 of them, and
// whatever the oracle itself throws (BackendUnreachable, ...).
BeliefState belief_state(backend::ScoreOracle& oracle, const ProbePrompt& prompt,
                         const chess::BoardState& board, const std::string& context = {});

struct ProbeMetrics {
  std::size_t prompts = 0;
  double weight_on_valid = 0.0;   // mean over prompts
  double argmax_accuracy = 0.0;   // fraction of prompts with a valid argmax
};

// Throws Error on an empty list.
ProbeMetrics probe_metrics(const std::vector<BeliefState>& states);

// Writes an 8x8 CSV grid (rank 8 first, files a..h) to `csv_path` and a JSON
// sidecar next to it with the extension replaced by ".json". Throws IoFailure.
void emit_heatmap(const BeliefState& state, const std::filesystem::path& csv_path);

// Reads a grid written by emit_heatmap back into index order.
std::array<double, 64> read_heatmap(const std::filesystem::path& csv_path);

// "white_bishop"
std::string prompt_slug(const ProbePrompt& prompt);

}  // namespace chesscomm::probe
