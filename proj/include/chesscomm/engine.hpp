#pragma once

// UCI engine client and the engine-derived control tags used at inference.

#include <array>
#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chesscomm/chess.hpp"
#include "chesscomm/error.hpp"
#include "chesscomm/tagset.hpp"

namespace chesscomm::engine {

class EngineError : public Error {
 public:
  using Error::Error;
};
class EngineSpawnFailure : public EngineError {
 public:
  using EngineError::EngineError;
};
class HandshakeTimeout : public EngineError {
 public:
  using EngineError::EngineError;
};
class ProtocolViolation : public EngineError {
 public:
  using EngineError::EngineError;
};
class EngineCrashed : public EngineError {
 public:
  using EngineError::EngineError;
};
class SearchTimeout : public EngineError {
 public:
  using EngineError::EngineError;
};
class UnparseableInfo : public EngineError {
 public:
  using EngineError::EngineError;
};

// ---- scores -------------------------------------------------------------

// A UCI score, always from the point of view of the side to move.
struct Score {
  enum class Kind { Cp, Mate, Wdl };
  Kind kind = Kind::Cp;
  int value = 0;                    // centipawns, or signed moves to mate
  std::array<int, 3> wdl{0, 0, 0};  // per mille; meaningful for Kind::Wdl

  static Score cp(int v) { return {Kind::Cp, v, {}}; }
  static Score mate(int moves) { return {Kind::Mate, moves, {}}; }
  static Score from_wdl(int w, int d, int l) { return {Kind::Wdl, 0, {w, d, l}}; }
  bool operator==(const Score&) const = default;
};

enum class WinProbSource { EngineWdl, CpLogistic };

struct WinProbMapping {
  WinProbSource source = WinProbSource::EngineWdl;
  double k = 0.004;  // logistic scale per centipawn
};

// Wdl: (W + D/2) / 1000. Cp: 1 / (1 + exp(-k * cp)). Mate for the side to
// move: 1; mate against it (including "mate 0"): 0.
double score_to_winprob(const Score& score, const WinProbMapping& mapping = {});

// ---- UCI info lines -------------------------------------------------------

struct InfoLine {
  int multipv = 1;
  std::optional<int> depth;
  std::optional<Score> cp_or_mate;
  std::optional<Score> wdl;
  std::vector<std::string> pv;  // UCI moves
};

// nullopt for lines that are not "info" lines or carry no score (e.g.
// "info string ..." or "info currmove ..."). Throws UnparseableInfo on a
// malformed score or multipv field.
std::optional<InfoLine> parse_info(std::string_view line);

// ---- configuration ------------------------------------------------------

struct SearchBudget {
  enum class Kind { Nodes, Depth };
  Kind kind = Kind::Nodes;
  std::uint64_t value = 100000;

  static SearchBudget nodes(std::uint64_t n) { return {Kind::Nodes, n}; }
  static SearchBudget depth(std::uint64_t d) { return {Kind::Depth, d}; }
  std::string go_command() const;  // "go nodes N" / "go depth D"
};

// Upper bounds on ΔP for Excellent, Good, Inaccuracy, Mistake; anything
// above the last is a Blunder.
struct QualityThresholds {
  std::array<double, 4> upper{0.02, 0.05, 0.10, 0.20};

  // Throws Error unless strictly increasing within [0, 1].
  void validate() const;
};

struct EngineConfig {
  std::filesystem::path executable;
  std::vector<std::string> args;
  std::optional<std::filesystem::path> transcript;  // fake-engine mode
  SearchBudget budget;
  int multipv = 1;
  WinProbMapping winprob;
  QualityThresholds thresholds;
  std::chrono::milliseconds handshake_timeout{10000};
  std::chrono::milliseconds search_timeout{60000};

  // Search and mapping parameters only; open() also needs an executable or
  // a transcript.
  void validate() const;
};

// ---- transports ---------------------------------------------------------

class Transport {
 public:
  enum class Status { Line, Timeout, Closed };
  struct Read {
    Status status;
    std::string line;
  };

  virtual ~Transport() = default;
  virtual void send(std::string_view line) = 0;
  virtual Read read_line(std::chrono::milliseconds timeout) = 0;
};

// Child process speaking UCI on stdin/stdout.
class ProcessTransport : public Transport {
 public:
  // Throws EngineSpawnFailure.
  ProcessTransport(const std::filesystem::path& executable, const std::vector<std::string>& args);
  ~ProcessTransport() override;
  ProcessTransport(const ProcessTransport&) = delete;
  ProcessTransport& operator=(const ProcessTransport&) = delete;

  void send(std::string_view line) override;
  Read read_line(std::chrono::milliseconds timeout) override;

 private:
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  bool closed_ = false;
};

// Scripted engine. Script lines:
//   > text     expected input ("*" in text matches any run of characters)
//   < text     output made available once all preceding inputs arrived
//   ! crash    the engine disappears (reads report Closed)
//   # ...      comment; blank lines ignored
// Reads past the available output time out immediately. Inputs arriving
// after the script is exhausted are ignored; an input that does not match
// the next expectation throws ProtocolViolation. Output lines still unread
// when an input arrives stay queued for later reads.
class TranscriptTransport : public Transport {
 public:
  static TranscriptTransport from_file(const std::filesystem::path& path);
  explicit TranscriptTransport(std::string_view script);

  void send(std::string_view line) override;
  Read read_line(std::chrono::milliseconds timeout) override;

  // Commands received so far.
  const std::vector<std::string>& received() const { return received_; }
  bool finished() const { return pos_ == steps_.size() && pending_.empty(); }

 private:
  struct Step {
    char kind;  // '>', '<', '!'
    std::string text;
  };
  std::vector<Step> steps_;
  std::size_t pos_ = 0;
  std::deque<std::string> pending_;
  std::vector<std::string> received_;
};

// True when `text` matches `pattern` with "*" wildcards.
bool glob_match(std::string_view pattern, std::string_view text);

// ---- session ------------------------------------------------------------

struct PvLine {
  int multipv = 1;
  std::vector<std::string> uci;
  std::vector<std::string> san;
  Score score;  // score actually used for win_prob
  double win_prob = 0.5;

  bool operator==(const PvLine&) const = default;
};

struct EngineEval {
  chess::MoveRecord best_move;
  double win_prob = 0.5;  // side to move
  std::vector<PvLine> pvs;

  bool operator==(const EngineEval&) const = default;
};

// Canonical JSON text of an evaluation; equal evaluations give equal bytes.
std::string to_json(const EngineEval& eval);

class EngineSession {
 public:
  // Spawns the executable, or replays config.transcript when set. Throws
  // Error when neither is given.
  static EngineSession open(const EngineConfig& config);
  // Runs the handshake over an existing transport.
  EngineSession(std::unique_ptr<Transport> transport, EngineConfig config);
  ~EngineSession();
  EngineSession(EngineSession&&) noexcept;
  EngineSession& operator=(EngineSession&&) noexcept;

  EngineEval evaluate(const chess::BoardState& board);
  EngineEval evaluate(const chess::BoardState& board, int multipv, const SearchBudget& budget);

  // Sends "quit" once; the destructor does this when not called explicitly.
  void quit();

  const EngineConfig& config() const { return config_; }
  const std::string& engine_name() const { return name_; }
  bool wdl_enabled() const { return wdl_enabled_; }
  // Every command sent, in order.
  const std::vector<std::string>& sent() const { return sent_; }
  Transport& transport() { return *transport_; }

 private:
  void send(const std::string& line);
  void handshake();
  void set_multipv(int n);

  std::unique_ptr<Transport> transport_;
  EngineConfig config_;
  std::string name_;
  bool wdl_enabled_ = false;
  int current_multipv_ = 0;
  bool quit_sent_ = false;
  std::vector<std::string> sent_;
};

// ---- tags ---------------------------------------------------------------

struct DeltaClass {
  MoveQuality quality;
  double delta;
};

// ΔP = max(0, p_best - p_played).
DeltaClass classify_delta(double p_best, double p_played, const QualityThresholds& t = {});

struct TagRequest {
  CommentaryType type = CommentaryType::MoveQuality;
  bool want_suggestion = true;
  std::optional<LengthClass> length;  // medium when unset
};

struct DerivedTags {
  TagSet tags;
  EngineEval before;                // position before the move (M*, P_M*)
  std::optional<EngineEval> after;  // absent when the move ends the game
  double p_best = 0.5;              // P_M*
  double p_played = 0.5;            // P_M, mover's point of view
  double delta = 0.0;
};

// The suggested move is M* alone and is omitted when M equals M*. Entity
// tags are never set.
DerivedTags derive_tags(EngineSession& session, const chess::BoardState& board,
                        const chess::MoveRecord& move, const TagRequest& request);

}  // namespace chesscomm::engine
