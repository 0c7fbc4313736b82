#include "chesscomm/probe.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace chesscomm::probe {

using chess::Color;
using chess::PieceKind;
using chess::Square;
using json = nlohmann::ordered_json;

namespace {

constexpr std::array<PieceKind, 6> kPromptKinds = {PieceKind::King,   PieceKind::Queen,  PieceKind::Rook,
                                                   PieceKind::Bishop, PieceKind::Knight, PieceKind::Pawn};

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

TemplateSet::TemplateSet() {
  for (Color c : {Color::White, Color::Black})
    for (PieceKind k : kPromptKinds)
      templates_[{c, k}] = std::string(chess::color_name(c)) + "'s " + std::string(chess::piece_name(k)) + " on ";
}

const std::string& TemplateSet::get(Color color, PieceKind kind) const { return templates_.at({color, kind}); }

void TemplateSet::set(Color color, PieceKind kind, std::string text) {
  if (text.empty() || text.back() != ' ')
    throw Error("probe template must end with a space: \"" + text + "\"");
  templates_[{color, kind}] = std::move(text);
}

std::vector<ProbePrompt> build_prompts(const chess::BoardState& board, const TemplateSet& templates) {
  std::vector<ProbePrompt> out;
  for (Color c : {Color::White, Color::Black}) {
    for (PieceKind k : kPromptKinds) {
      bool present = false;
      for (const Square sq : chess::all_squares()) {
        const auto p = board.at(sq);
        if (p && p->color == c && p->kind == k) {
          present = true;
          break;
        }
      }
      if (present) out.push_back({c, k, templates.get(c, k)});
    }
  }
  return out;
}

const std::vector<std::string>& square_tokens() {
  static const std::vector<std::string> tokens = [] {
    std::vector<std::string> t;
    for (const Square sq : chess::all_squares()) t.push_back(sq.name());
    return t;
  }();
  return tokens;
}

std::string probe_context(const chess::GameRecord& record, const chess::BoardState& board,
                          const repr::SegmentToggles& segments) {
  const auto config = repr::RepresentationConfig::game_state(segments);
  std::string out = "[" + config.scheme + "]";
  for (const auto& seg : repr::render_game_state(record, board, config)) {
    out += " [" + std::string(repr::segment_name(seg.segment)) + "]";
    if (!seg.text.empty()) out += " " + seg.text;
  }
  return out;
}

double BeliefState::weight_on_valid() const {
  double w = 0.0;
  for (const Square sq : valid_squares) w += distribution[sq.index()];
  return w;
}

Square BeliefState::argmax() const {
  Square best = Square(0, 0);
  double best_p = -1.0;
  for (int file = 0; file < 8; ++file) {
    for (int rank = 0; rank < 8; ++rank) {
      const Square sq(file, rank);
      if (distribution[sq.index()] > best_p) {
        best_p = distribution[sq.index()];
        best = sq;
      }
    }
  }
  return best;
}

bool BeliefState::argmax_valid() const {
  const Square s = argmax();
  return std::find(valid_squares.begin(), valid_squares.end(), s) != valid_squares.end();
}

BeliefState belief_state(backend::ScoreOracle& oracle, const ProbePrompt& prompt, const chess::BoardState& board,
                         const std::string& context) {
  const std::string text = context.empty() ? prompt.text : context + " " + prompt.text;
  const auto logprobs = oracle.score(text, square_tokens());
  if (logprobs.size() != 64)
    throw backend::MalformedResponse("expected 64 square scores, got " + std::to_string(logprobs.size()));
  for (std::size_t i = 0; i < logprobs.size(); ++i)
    if (!std::isfinite(logprobs[i]))
      throw backend::NonFiniteScore("score for " + square_tokens()[i] + " is not finite");

  BeliefState s;
  s.prompt = prompt;
  const double m = *std::max_element(logprobs.begin(), logprobs.end());
  double total = 0.0;
  for (int i = 0; i < 64; ++i) {
    s.distribution[i] = std::exp(logprobs[i] - m);
    total += s.distribution[i];
  }
  for (double& p : s.distribution) p /= total;

  for (const Square sq : chess::all_squares()) {
    const auto p = board.at(sq);
    if (p && p->color == prompt.color && p->kind == prompt.kind) s.valid_squares.push_back(sq);
  }
  std::sort(s.valid_squares.begin(), s.valid_squares.end());
  return s;
}

ProbeMetrics probe_metrics(const std::vector<BeliefState>& states) {
  if (states.empty()) throw Error("probe metrics need at least one belief state");
  ProbeMetrics m;
  m.prompts = states.size();
  std::size_t hits = 0;
  for (const auto& s : states) {
    m.weight_on_valid += s.weight_on_valid();
    if (s.argmax_valid()) ++hits;
  }
  m.weight_on_valid /= static_cast<double>(states.size());
  m.argmax_accuracy = static_cast<double>(hits) / static_cast<double>(states.size());
  return m;
}

std::string prompt_slug(const ProbePrompt& prompt) {
  std::string color(chess::color_name(prompt.color));
  std::transform(color.begin(), color.end(), color.begin(), [](unsigned char c) { return std::tolower(c); });
  return color + "_" + std::string(chess::piece_name(prompt.kind));
}

void emit_heatmap(const BeliefState& state, const std::filesystem::path& csv_path) {
  std::string csv;
  for (int rank = 7; rank >= 0; --rank) {
    for (int file = 0; file < 8; ++file) {
      if (file) csv += ',';
      csv += format_double(state.distribution[Square(file, rank).index()]);
    }
    csv += '\n';
  }

  json side;
  side["color"] = std::string(chess::color_name(state.prompt.color));
  side["piece"] = std::string(chess::piece_name(state.prompt.kind));
  side["prompt"] = state.prompt.text;
  json valid = json::array();
  for (const Square sq : state.valid_squares) valid.push_back(sq.name());
  side["valid_squares"] = valid;
  side["argmax"] = state.argmax().name();
  side["weight_on_valid"] = state.weight_on_valid();
  side["grid"] = csv_path.filename().string();
  side["layout"] = "rows rank 8 to 1, columns a to h";

  auto write = [](const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoFailure("cannot open " + p.string() + " for writing");
    out << body;
    out.close();
    if (!out) throw IoFailure("error writing " + p.string());
  };
  write(csv_path, csv);
  std::filesystem::path side_path = csv_path;
  side_path.replace_extension(".json");
  write(side_path, side.dump(2) + "\n");
}

std::array<double, 64> read_heatmap(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoFailure("cannot open " + csv_path.string());
  std::array<double, 64> out{};
  std::string line;
  int rank = 7;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (rank < 0) throw IoFailure(csv_path.string() + ": more than 8 rows");
    std::stringstream row(line);
    std::string cell;
    int file = 0;
    while (std::getline(row, cell, ',')) {
      double v = 0.0;
      const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (file >= 8 || r.ec != std::errc() || r.ptr != cell.data() + cell.size())
        throw IoFailure(csv_path.string() + ": bad cell \"" + cell + "\"");
      out[Square(file, rank).index()] = v;
      ++file;
    }
    if (file != 8) throw IoFailure(csv_path.string() + ": row with " + std::to_string(file) + " cells");
    --rank;
  }
  if (rank != -1) throw IoFailure(csv_path.string() + ": fewer than 8 rows");
  return out;
}

}  // namespace chesscomm::probe
