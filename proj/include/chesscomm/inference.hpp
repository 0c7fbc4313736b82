#pragma once

// Inference path: engine-derived tags, model input, text generation and a
// grounding check of the generated text against the position.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chesscomm/backend.hpp"
#include "chesscomm/chess.hpp"
#include "chesscomm/engine.hpp"
#include "chesscomm/error.hpp"
#include "chesscomm/pgn.hpp"
#include "chesscomm/representation.hpp"
#include "chesscomm/tagset.hpp"

namespace chesscomm::inference {

// The template realizer only covers Move Description, Move Quality and
// Move Comparison.
class NotSupported : public Error {
 public:
  using Error::Error;
};

class InvalidRequest : public Error {
 public:
  using Error::Error;
};

struct InferenceRequest {
  chess::GameRecord game;  // G'; the move is played from game.final_position()
  chess::MoveRecord move;
  CommentaryType type = CommentaryType::MoveQuality;
  std::optional<LengthClass> length;  // medium when unset

  // Throws InvalidRequest (bad FEN or illegal SAN).
  static InferenceRequest from_fen(std::string_view fen, std::string_view san, CommentaryType type,
                                   std::optional<LengthClass> length = std::nullopt);
  chess::BoardState board() const { return game.final_position(); }
};

struct PreparedInput {
  repr::InputText input;  // Fully configuration
  TagSet tags;            // never carries pronoun or proper-noun tags
  engine::DerivedTags derived;
};

PreparedInput build_inference_request(engine::EngineSession& session, const InferenceRequest& request);

// Deterministic commentary for the three in-focus types. Quality uses the
// "!!", "!", "!?", "?", "??" markers plus a fixed phrase; "Better was
// <SAN>." follows when the suggestion differs from the played move. The
// output's token count falls in the requested length class (medium when
// unset). Throws NotSupported / InvalidRequest.
std::string realize_template(const TagSet& tags, const chess::BoardState& board,
                             const chess::MoveRecord& move);

// ---- grounding ----------------------------------------------------------

enum class ViolationKind { IllegalSan, NonexistentPiece };
std::string_view to_string(ViolationKind k);  // "illegal-SAN", "nonexistent-piece"

struct Violation {
  std::size_t offset = 0;  // byte span in the checked text
  std::size_t length = 0;
  ViolationKind kind = ViolationKind::IllegalSan;
  std::string detail;
};

struct GroundingReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// SAN runs must be sequentially legal from `board`; "<piece> on <square>"
// claims (optionally with a color) must match the placement. When `move`
// is given, runs legal from the position after it and claims true after it
// are accepted too, so text may describe the move's result.
GroundingReport ground_check(std::string_view text, const chess::BoardState& board,
                             const std::optional<chess::MoveRecord>& move = std::nullopt);

// ---- orchestration ------------------------------------------------------

struct InferOptions {
  backend::GenerationBackend* backend = nullptr;  // template realizer when null
  int max_tokens = 64;
  // Reject-and-retry: total backend attempts while grounding fails.
  int max_attempts = 1;
};

struct InferenceResult {
  PreparedInput prepared;
  std::string text;
  GroundingReport report;  // for the returned text
  int attempts = 0;
  std::string backend;  // "template" or "http"
};

InferenceResult infer(engine::EngineSession& session, const InferenceRequest& request,
                      const InferOptions& options = {});

std::string to_json(const InferenceResult& r);

}  // namespace chesscomm::inference
