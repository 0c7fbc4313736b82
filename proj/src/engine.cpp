#include "chesscomm/engine.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"

extern char** environ;

namespace chesscomm::engine {

namespace {

using Clock = std::chrono::steady_clock;
using std::chrono::milliseconds;

std::vector<std::string_view> words(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

bool looks_like_uci_move(std::string_view s) {
  if (s.size() != 4 && s.size() != 5) return false;
  auto file = [](char c) { return c >= 'a' && c <= 'h'; };
  auto rank = [](char c) { return c >= '1' && c <= '8'; };
  if (!file(s[0]) || !rank(s[1]) || !file(s[2]) || !rank(s[3])) return false;
  return s.size() == 4 || std::strchr("qrbn", s[4]) != nullptr;
}

milliseconds remaining(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<milliseconds>(deadline - Clock::now());
  return std::max(left, milliseconds(0));
}

}  // namespace

double score_to_winprob(const Score& score, const WinProbMapping& mapping) {
  switch (score.kind) {
    case Score::Kind::Wdl: {
      const double total = 1000.0;
      return std::clamp((score.wdl[0] + 0.5 * score.wdl[1]) / total, 0.0, 1.0);
    }
    case Score::Kind::Mate:
      return score.value > 0 ? 1.0 : 0.0;
    case Score::Kind::Cp:
      return 1.0 / (1.0 + std::exp(-mapping.k * score.value));
  }
  return 0.5;
}

std::optional<InfoLine> parse_info(std::string_view line) {
  const auto w = words(line);
  if (w.empty() || w[0] != "info") return std::nullopt;
  InfoLine info;
  bool scored = false;
  auto need_int = [&](std::size_t i, std::string_view what) {
    if (i >= w.size()) throw UnparseableInfo("missing value for " + std::string(what) + ": " + std::string(line));
    const auto v = to_int(w[i]);
    if (!v) throw UnparseableInfo("bad " + std::string(what) + " '" + std::string(w[i]) + "': " + std::string(line));
    return *v;
  };
  for (std::size_t i = 1; i < w.size();) {
    const std::string_view key = w[i];
    if (key == "string") return std::nullopt;
    if (key == "depth") {
      info.depth = need_int(i + 1, "depth");
      i += 2;
    } else if (key == "multipv") {
      info.multipv = need_int(i + 1, "multipv");
      if (info.multipv < 1) throw UnparseableInfo("multipv must be positive: " + std::string(line));
      i += 2;
    } else if (key == "score") {
      if (i + 1 >= w.size()) throw UnparseableInfo("empty score: " + std::string(line));
      const std::string_view kind = w[i + 1];
      if (kind == "cp") {
        info.cp_or_mate = Score::cp(need_int(i + 2, "cp"));
        i += 3;
      } else if (kind == "mate") {
        info.cp_or_mate = Score::mate(need_int(i + 2, "mate"));
        i += 3;
      } else if (kind == "wdl") {
        info.wdl = Score::from_wdl(need_int(i + 2, "wdl"), need_int(i + 3, "wdl"),
                                   need_int(i + 4, "wdl"));
        i += 5;
      } else {
        throw UnparseableInfo("unknown score kind '" + std::string(kind) + "': " + std::string(line));
      }
      scored = true;
      while (i < w.size() && (w[i] == "lowerbound" || w[i] == "upperbound")) ++i;
    } else if (key == "wdl") {
      info.wdl = Score::from_wdl(need_int(i + 1, "wdl"), need_int(i + 2, "wdl"),
                                 need_int(i + 3, "wdl"));
      scored = true;
      i += 4;
    } else if (key == "pv") {
      ++i;
      while (i < w.size() && looks_like_uci_move(w[i])) info.pv.emplace_back(w[i++]);
    } else if (key == "refutation" || key == "currline") {
      ++i;
      while (i < w.size() && (looks_like_uci_move(w[i]) || to_int(w[i]))) ++i;
    } else if (key == "seldepth" || key == "time" || key == "nodes" || key == "nps" ||
               key == "hashfull" || key == "tbhits" || key == "sbhits" || key == "cpuload" ||
               key == "currmove" || key == "currmovenumber") {
      i += 2;
    } else {
      ++i;  // unknown token; engines add vendor extensions
    }
  }
  if (!scored) return std::nullopt;
  return info;
}

std::string SearchBudget::go_command() const {
  return (kind == Kind::Nodes ? "go nodes " : "go depth ") + std::to_string(value);
}

void QualityThresholds::validate() const {
  double prev = 0.0;
  for (std::size_t i = 0; i < upper.size(); ++i) {
    const double t = upper[i];
    if (!(t >= 0.0 && t <= 1.0) || (i > 0 && !(t > prev))) {
      throw Error("quality thresholds must be strictly increasing within [0, 1]");
    }
    prev = t;
  }
}

void EngineConfig::validate() const {
  if (budget.value == 0) throw Error("search budget must be positive");
  if (multipv < 1) throw Error("multipv must be at least 1");
  if (!(winprob.k > 0.0)) throw Error("logistic scale must be positive");
  thresholds.validate();
}

// ---- ProcessTransport ----------------------------------------------------

ProcessTransport::ProcessTransport(const std::filesystem::path& executable,
                                   const std::vector<std::string>& args) {
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw EngineSpawnFailure(std::strerror(errno));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw EngineSpawnFailure(std::strerror(errno));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  const std::string exe = executable.string();
  std::vector<std::string> argv_store{exe};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  argv.push_back(nullptr);

  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, exe.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw EngineSpawnFailure("cannot start " + exe + ": " + std::strerror(rc));
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ProcessTransport::~ProcessTransport() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ <= 0) return;
  for (int i = 0; i < 50; ++i) {
    if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
    std::this_thread::sleep_for(milliseconds(10));
  }
  ::kill(pid_, SIGKILL);
  ::waitpid(pid_, nullptr, 0);
}

void ProcessTransport::send(std::string_view line) {
  std::string data(line);
  data += '\n';
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw EngineCrashed("engine stdin closed: " + std::string(std::strerror(errno)));
    }
    off += static_cast<std::size_t>(n);
  }
}

Transport::Read ProcessTransport::read_line(milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return {Status::Line, std::move(line)};
    }
    if (closed_) {
      if (!buffer_.empty()) return {Status::Line, std::exchange(buffer_, {})};
      return {Status::Closed, {}};
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(remaining(deadline).count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      closed_ = true;
      continue;
    }
    if (ready == 0) return {Status::Timeout, {}};
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      closed_ = true;
      continue;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

// ---- TranscriptTransport -------------------------------------------------

bool glob_match(std::string_view pattern, std::string_view text) {
  std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (p < pattern.size() && pattern[p] == text[t]) {
      ++p;
      ++t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

TranscriptTransport::TranscriptTransport(std::string_view script) {
  std::istringstream in{std::string(script)};
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const char kind = line[0];
    if (kind != '>' && kind != '<' && kind != '!') {
      throw Error("transcript line " + std::to_string(lineno) + ": expected '>', '<' or '!'");
    }
    std::string text = line.substr(1);
    if (!text.empty() && text[0] == ' ') text.erase(0, 1);
    steps_.push_back({kind, std::move(text)});
  }
}

TranscriptTransport TranscriptTransport::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EngineSpawnFailure("cannot read transcript " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return TranscriptTransport(ss.str());
}

void TranscriptTransport::send(std::string_view line) {
  received_.emplace_back(line);
  // Output the client has not read yet stays queued, as in a pipe.
  while (pos_ < steps_.size() && steps_[pos_].kind == '<') pending_.push_back(steps_[pos_++].text);
  if (pos_ == steps_.size()) return;
  const Step& step = steps_[pos_];
  if (step.kind == '!') throw EngineCrashed("scripted engine has exited");
  if (!glob_match(step.text, line)) {
    throw ProtocolViolation("transcript expected '" + step.text + "', got '" + std::string(line) +
                            "'");
  }
  ++pos_;
}

Transport::Read TranscriptTransport::read_line(milliseconds) {
  if (!pending_.empty()) {
    Read r{Status::Line, std::move(pending_.front())};
    pending_.pop_front();
    return r;
  }
  if (pos_ == steps_.size()) return {Status::Timeout, {}};
  const Step& step = steps_[pos_];
  if (step.kind == '!') return {Status::Closed, {}};
  if (step.kind == '>') return {Status::Timeout, {}};
  ++pos_;
  return {Status::Line, step.text};
}

// ---- EngineSession -------------------------------------------------------

EngineSession EngineSession::open(const EngineConfig& config) {
  config.validate();
  if (!config.transcript && config.executable.empty())
    throw Error("no engine executable or transcript given");
  if (config.transcript) {
    return EngineSession(
        std::make_unique<TranscriptTransport>(TranscriptTransport::from_file(*config.transcript)),
        config);
  }
  return EngineSession(std::make_unique<ProcessTransport>(config.executable, config.args), config);
}

EngineSession::EngineSession(std::unique_ptr<Transport> transport, EngineConfig config)
    : transport_(std::move(transport)), config_(std::move(config)) {
  config_.validate();
  handshake();
}

EngineSession::~EngineSession() {
  try {
    quit();
  } catch (...) {
  }
}

void EngineSession::quit() {
  if (!transport_ || quit_sent_) return;
  quit_sent_ = true;
  send("quit");
}

EngineSession::EngineSession(EngineSession&&) noexcept = default;
EngineSession& EngineSession::operator=(EngineSession&&) noexcept = default;

void EngineSession::send(const std::string& line) {
  sent_.push_back(line);
  transport_->send(line);
}

void EngineSession::handshake() {
  const auto deadline = Clock::now() + config_.handshake_timeout;
  auto wait_for = [&](std::string_view token, auto&& on_line) {
    for (;;) {
      auto r = transport_->read_line(remaining(deadline));
      if (r.status == Transport::Status::Closed) {
        throw EngineCrashed("engine exited during handshake (waiting for " + std::string(token) + ")");
      }
      if (r.status == Transport::Status::Timeout) {
        throw HandshakeTimeout("no '" + std::string(token) + "' within " +
                               std::to_string(config_.handshake_timeout.count()) + " ms");
      }
      if (r.line == token) return;
      on_line(r.line);
    }
  };

  bool wdl_option = false;
  send("uci");
  wait_for("uciok", [&](const std::string& line) {
    const auto w = words(line);
    if (w.size() >= 3 && w[0] == "id" && w[1] == "name") {
      name_ = line.substr(line.find("name") + 5);
    } else if (w.size() >= 3 && w[0] == "option" && w[1] == "name" && w[2] == "UCI_ShowWDL") {
      wdl_option = true;
    }
  });
  set_multipv(config_.multipv);
  if (wdl_option && config_.winprob.source == WinProbSource::EngineWdl) {
    send("setoption name UCI_ShowWDL value true");
    wdl_enabled_ = true;
  }
  send("isready");
  wait_for("readyok", [](const std::string&) {});
}

void EngineSession::set_multipv(int n) {
  if (n == current_multipv_) return;
  send("setoption name MultiPV value " + std::to_string(n));
  current_multipv_ = n;
}

EngineEval EngineSession::evaluate(const chess::BoardState& board) {
  return evaluate(board, config_.multipv, config_.budget);
}

EngineEval EngineSession::evaluate(const chess::BoardState& board, int multipv,
                                   const SearchBudget& budget) {
  if (!transport_) throw EngineError("session has been moved from");
  if (multipv < 1) throw Error("multipv must be at least 1");
  if (!chess::has_legal_move(board)) throw Error("cannot search a position without legal moves");
  set_multipv(multipv);
  send("ucinewgame");
  send("position fen " + board.fen());
  send(budget.go_command());

  const auto deadline = Clock::now() + config_.search_timeout;
  std::map<int, InfoLine> latest;
  std::string bestmove;
  for (;;) {
    auto r = transport_->read_line(remaining(deadline));
    if (r.status == Transport::Status::Closed) throw EngineCrashed("engine exited during search");
    if (r.status == Transport::Status::Timeout) {
      try {
        send("stop");
        const auto grace = Clock::now() + milliseconds(1000);
        for (;;) {
          auto s = transport_->read_line(remaining(grace));
          if (s.status != Transport::Status::Line || s.line.rfind("bestmove", 0) == 0) break;
        }
      } catch (const EngineError&) {
      }
      throw SearchTimeout("no bestmove within " + std::to_string(config_.search_timeout.count()) +
                          " ms");
    }
    if (r.line.rfind("bestmove", 0) == 0) {
      const auto w = words(r.line);
      if (w.size() < 2) throw ProtocolViolation("bare bestmove");
      bestmove = std::string(w[1]);
      break;
    }
    if (auto info = parse_info(r.line); info && !info->pv.empty() && info->multipv <= multipv) {
      latest[info->multipv] = std::move(*info);
    }
  }

  EngineEval eval;
  try {
    eval.best_move = chess::parse_uci_move(board, bestmove);
  } catch (const chess::ChessError& e) {
    throw ProtocolViolation("bestmove '" + bestmove + "': " + e.what());
  }
  if (latest.empty()) throw UnparseableInfo("no scored info line with a pv before bestmove");

  for (auto& [idx, info] : latest) {
    PvLine pv;
    pv.multipv = idx;
    const bool use_wdl = info.wdl && (config_.winprob.source == WinProbSource::EngineWdl ||
                                      !info.cp_or_mate);
    pv.score = use_wdl ? *info.wdl : *info.cp_or_mate;
    pv.win_prob = score_to_winprob(pv.score, config_.winprob);
    chess::BoardState cur = board;
    for (const auto& u : info.pv) {
      try {
        const auto m = chess::parse_uci_move(cur, u);
        pv.uci.push_back(u);
        pv.san.push_back(m.san);
        cur = chess::apply_move(cur, m);
      } catch (const chess::ChessError& e) {
        throw ProtocolViolation("pv move '" + u + "' (multipv " + std::to_string(idx) +
                                "): " + e.what());
      }
    }
    eval.pvs.push_back(std::move(pv));
  }

  const std::string best_uci = eval.best_move.uci();
  std::stable_sort(eval.pvs.begin(), eval.pvs.end(), [&](const PvLine& a, const PvLine& b) {
    if (a.win_prob != b.win_prob) return a.win_prob > b.win_prob;
    const bool ab = a.uci.front() == best_uci;
    const bool bb = b.uci.front() == best_uci;
    if (ab != bb) return ab;
    return a.multipv < b.multipv;
  });
  if (eval.pvs.front().uci.front() != best_uci) {
    throw ProtocolViolation("bestmove " + best_uci + " is not the highest-valued line (" +
                            eval.pvs.front().uci.front() + ")");
  }
  eval.win_prob = eval.pvs.front().win_prob;
  return eval;
}

std::string to_json(const EngineEval& eval) {
  nlohmann::ordered_json j;
  j["best_move"] = {{"uci", eval.best_move.uci()}, {"san", eval.best_move.san}};
  j["win_prob"] = eval.win_prob;
  auto& pvs = j["pvs"] = nlohmann::ordered_json::array();
  for (const auto& pv : eval.pvs) {
    nlohmann::ordered_json score;
    switch (pv.score.kind) {
      case Score::Kind::Cp: score = {{"cp", pv.score.value}}; break;
      case Score::Kind::Mate: score = {{"mate", pv.score.value}}; break;
      case Score::Kind::Wdl: score = {{"wdl", pv.score.wdl}}; break;
    }
    pvs.push_back({{"multipv", pv.multipv},
                   {"uci", pv.uci},
                   {"san", pv.san},
                   {"score", score},
                   {"win_prob", pv.win_prob}});
  }
  return j.dump();
}

// ---- tags ----------------------------------------------------------------

DeltaClass classify_delta(double p_best, double p_played, const QualityThresholds& t) {
  const double delta = std::max(0.0, p_best - p_played);
  static constexpr MoveQuality kOrder[] = {MoveQuality::Excellent, MoveQuality::Good,
                                           MoveQuality::Inaccuracy, MoveQuality::Mistake};
  for (std::size_t i = 0; i < t.upper.size(); ++i) {
    if (delta <= t.upper[i]) return {kOrder[i], delta};
  }
  return {MoveQuality::Blunder, delta};
}

DerivedTags derive_tags(EngineSession& session, const chess::BoardState& board,
                        const chess::MoveRecord& move, const TagRequest& request) {
  DerivedTags out;
  const chess::BoardState child = chess::apply_move(board, move);
  out.before = session.evaluate(board);
  out.p_best = out.before.win_prob;

  if (chess::is_checkmate(child)) {
    out.p_played = 1.0;
  } else if (chess::is_stalemate(child)) {
    out.p_played = 0.5;
  } else {
    out.after = session.evaluate(child);
    out.p_played = 1.0 - out.after->win_prob;
  }

  const bool played_best = move.uci() == out.before.best_move.uci();
  const DeltaClass dc = played_best ? DeltaClass{MoveQuality::Excellent, 0.0}
                                    : classify_delta(out.p_best, out.p_played,
                                                     session.config().thresholds);
  out.delta = dc.delta;

  out.tags.commentary_type = request.type;
  out.tags.move_quality = dc.quality;
  if (request.want_suggestion && !played_best) {
    out.tags.suggested =
        std::vector<SuggestedLine>{{{out.before.best_move.san}, board, std::nullopt}};
  }
  out.tags.length = request.length.value_or(LengthClass::Medium);
  return out;
}

}  // namespace chesscomm::engine
