// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Oracles live on the test side (oracle_movegen, fake engine, the
// probe oracles below).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "chesscomm/chess.hpp"
#include "chesscomm/corpus.hpp"
#include "chesscomm/engine.hpp"
#include "chesscomm/inference.hpp"
#include "chesscomm/probe.hpp"
#include "chesscomm/representation.hpp"
#include "chesscomm/tags.hpp"
#include "fake_engine.hpp"
#include "json.hpp"
#include "oracle_movegen.hpp"

using namespace chesscomm;
using chess::BoardState;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kData = CHESSCOMM_TEST_DATA;

// Collects failed expectations for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 20) failures.push_back(what);
    if (!ok) ++failed;
  }
  std::size_t failed = 0;
};

struct Result {
  bool pass;
  std::string detail;
};

Result finish(const Check& c, const std::string& detail) {
  if (c.failed == 0) return {true, detail};
  std::string d = std::to_string(c.failed) + " failed check(s): " + c.failures.front();
  for (std::size_t i = 1; i < std::min<std::size_t>(c.failures.size(), 3); ++i) d += "; " + c.failures[i];
  return {false, d};
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fixed(double v, int digits = 3) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(digits);
  o << v;
  return o.str();
}

BoardState play(std::initializer_list<const char*> sans) {
  BoardState b = BoardState::initial();
  for (const char* s : sans) b = chess::apply_move(b, chess::parse_san(b, s));
  return b;
}

tags::Commentary C(std::string text) { return {std::move(text), 0, "acceptance"}; }

std::string words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += i ? " w" : "w";
  return s;
}

// ---- 1 ------------------------------------------------------------------

Result chess_kernel() {
  const auto start = Clock::now();
  Check c;
  const BoardState initial = BoardState::initial();
  const auto ob = oracle::from_fen(initial.fen());
  const std::uint64_t expected[] = {20, 400, 8902};
  for (int d = 1; d <= 3; ++d) {
    c.expect(oracle::perft(ob, d) == expected[d - 1], "oracle perft(" + std::to_string(d) + ")");
    c.expect(chess::perft(initial, d) == expected[d - 1], "perft(" + std::to_string(d) + ")");
  }

  std::mt19937 rng(1000);
  int positions = 0;
  std::size_t moves_checked = 0;
  while (positions < 1000) {
    BoardState b = initial;
    const int plies = static_cast<int>(rng() % 120);
    for (int i = 0; i < plies; ++i) {
      const auto moves = chess::legal_moves(b);
      if (moves.empty()) break;
      b = chess::apply_move(b, moves[rng() % moves.size()]);
    }
    ++positions;
    const auto moves = chess::legal_moves(b);
    std::vector<std::string> ours;
    for (const auto& m : moves) {
      ours.push_back(m.uci());
      const std::string san = chess::format_san(b, m);
      bool ok = false;
      try {
        ok = chess::parse_san(b, san) == m;
      } catch (const Error&) {
      }
      c.expect(ok, "SAN round trip " + san + " in " + b.fen());
      ++moves_checked;
    }
    std::sort(ours.begin(), ours.end());
    c.expect(ours == oracle::legal_uci(b.fen()), "legal moves differ from the oracle in " + b.fen());
  }
  const double secs = seconds_since(start);
  c.expect(secs < 60.0, "runtime " + fixed(secs, 1) + " s");
  return finish(c, "perft 20/400/8902; SAN round trip of " + std::to_string(moves_checked) + " moves in " +
                       std::to_string(positions) + " positions; " + fixed(secs, 1) + " s");
}

// ---- 2 ------------------------------------------------------------------

Result representation() {
  Check c;
  auto has_token = [](const std::string& text, const std::string& token) {
    std::istringstream in(text);
    std::vector<std::string> t;
    for (std::string w; in >> w;) t.push_back(w);
    // Tokens here are two words ("White R_c5").
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
      if (t[i] + " " + t[i + 1] == token) return true;
    return false;
  };
  const auto rook = BoardState::from_fen("4k3/8/8/2R5/8/8/8/4K3 w - - 0 1");
  c.expect(has_token(repr::render_pieces(rook), "White R_c5"), "piece token White R_c5");
  const auto hanging = BoardState::from_fen("4k3/8/8/8/8/8/p7/R3K3 w - - 0 1");
  c.expect(repr::render_attacks(hanging) == "White R_a1$P_a2", "attack token White R_a1$P_a2");

  TagSet q;
  q.move_quality = MoveQuality::Good;
  c.expect(repr::render_tags(q) == "[Move Quality] Good", "[Move Quality] Good");
  TagSet s;
  s.suggested = std::vector<SuggestedLine>{{{"Ne4"}, BoardState::initial(), std::nullopt}};
  c.expect(repr::render_tags(s) == "[Suggested Move] Ne4", "[Suggested Move] Ne4");
  for (auto [cls, text] : {std::pair{LengthClass::Short, "[short]"}, std::pair{LengthClass::Medium, "[medium]"},
                           std::pair{LengthClass::Long, "[long]"}}) {
    TagSet l;
    l.length = cls;
    c.expect(repr::render_tags(l) == text, text);
  }

  chess::GameRecord g;
  g.start = BoardState::from_fen("4k3/8/8/8/8/5N2/8/4K3 w - - 0 1");
  const auto ne5 = chess::parse_san(g.start, "Ne5");
  TagSet all = s;
  all.move_quality = MoveQuality::Good;
  all.length = LengthClass::Short;
  c.expect(repr::render_input(g, g.start, ne5, all, repr::RepresentationConfig::unconditioned()).text ==
               "[Unconditioned]",
           "[Unconditioned]");
  c.expect(repr::render_input(g, g.start, ne5, all, repr::RepresentationConfig::move_only()).text == "Ne5",
           "move-only input Ne5");
  const auto fully = repr::render_input(g, g.start, ne5, all, repr::RepresentationConfig::fully()).text;
  c.expect(fully == "[v1] [PGN] [PIECES] White K_e1 White N_f3 Black K_e8 [ATTACKS] [MOVE] Ne5 "
                    "[Move Quality] Good [Suggested Move] Ne4 [short]",
           "fully conditioned input: " + fully);
  return finish(c, "White R_c5, White R_a1$P_a2, [Move Quality] Good, [Suggested Move] Ne4, [Unconditioned], "
                   "[short]/[medium]/[long] byte-exact");
}

// ---- 3 ------------------------------------------------------------------

Result length_tagging() {
  Check c;
  const std::pair<std::size_t, LengthClass> bounds[] = {
      {7, LengthClass::Short}, {8, LengthClass::Medium}, {20, LengthClass::Medium}, {21, LengthClass::Long}};
  for (auto [n, cls] : bounds)
    c.expect(tags::tag_length(C(words(n))) == cls, std::to_string(n) + " tokens");
  c.expect(tags::tag_length(C(words(5))) == LengthClass::Short, "5 tokens");
  c.expect(tags::tag_length(C(words(12))) == LengthClass::Medium, "12 tokens");
  for (std::size_t n = 0; n <= 1000; ++n) {
    const LengthClass cls = tags::length_class(n);
    const int hits = (n <= 7) + (n >= 8 && n <= 20) + (n >= 21);
    c.expect(hits == 1, "partition at " + std::to_string(n));
    c.expect(cls == (n <= 7 ? LengthClass::Short : n <= 20 ? LengthClass::Medium : LengthClass::Long),
             "class at " + std::to_string(n));
  }
  return finish(c, "7->short, 8->medium, 20->medium, 21->long; counts 0..1000 partitioned");
}

// ---- 4 ------------------------------------------------------------------

Result quality_classification() {
  Check c;
  const double upper[] = {0.02, 0.05, 0.10, 0.20};
  int prev = -1;
  for (int i = 0; i < 10000; ++i) {
    const double d = i / 9999.0;
    engine::DeltaClass got;
    try {
      got = engine::classify_delta(d, 0.0);
    } catch (const Error& e) {
      c.expect(false, std::string("threw at ") + fixed(d, 6) + ": " + e.what());
      continue;
    }
    int expect = 4;
    for (int k = 0; k < 4; ++k)
      if (d <= upper[k]) {
        expect = k;
        break;
      }
    const int q = static_cast<int>(got.quality);
    c.expect(q == expect, "class at dP=" + fixed(d, 6));
    c.expect(q >= prev, "monotone at dP=" + fixed(d, 6));
    prev = q;
  }
  const auto top = engine::classify_delta(0.7, 0.7);
  c.expect(top.delta == 0.0 && top.quality == MoveQuality::Excellent, "dP=0 is Excellent");
  const auto neg = engine::classify_delta(0.40, 0.45);
  c.expect(neg.delta == 0.0 && neg.quality == MoveQuality::Excellent, "negative dP clamps to 0");
  c.expect(engine::classify_delta(0.5, 0.0).quality == MoveQuality::Blunder, "dP=0.5 is Blunder");
  return finish(c, "10,000-point sweep total and monotone; dP=0 -> Excellent; negative dP clamped");
}

// ---- 5 ------------------------------------------------------------------

struct Transcript {
  std::string file;
  BoardState board;
  std::vector<const char*> moves;  // derive_tags calls in transcript order
  int multipv;
  engine::SearchBudget budget;
};

Result engine_adapter() {
  Check c;
  const std::vector<Transcript> scripts = {
      {"opening_cp.uci", BoardState::initial(), {"e4"}, 1, engine::SearchBudget::nodes(1000)},
      {"knight_wdl.uci", play({"Nc3", "e5"}), {"a3"}, 2, engine::SearchBudget::nodes(5000)},
      {"scholar_mate.uci", play({"e4", "e5", "Qh5", "Nc6", "Bc4", "Nf6"}), {"Qxf7#", "d3"}, 1, engine::SearchBudget::depth(8)},
  };
  auto run = [&](const Transcript& t, bool& finished) {
    engine::EngineConfig config;
    config.multipv = t.multipv;
    config.budget = t.budget;
    config.transcript = kData + "/engine/" + t.file;
    auto transport = std::make_unique<engine::TranscriptTransport>(
        engine::TranscriptTransport::from_file(*config.transcript));
    auto* script = transport.get();
    engine::EngineSession session(std::move(transport), config);
    std::string out;
    for (const char* move : t.moves) {
      const auto d = engine::derive_tags(session, t.board, chess::parse_san(t.board, move),
                                         {CommentaryType::MoveQuality, true, std::nullopt});
      out += engine::to_json(d.before);
      if (d.after) out += engine::to_json(*d.after);
      out += repr::render_tags(d.tags) + "\n";
      if (std::string(move).back() == '#') {
        // Mating move: both sides of the comparison are certain wins.
        if (d.p_best != 1.0 || d.p_played != 1.0) out += "mate not mapped to 1";
      }
    }
    session.quit();
    finished = script->finished();
    return out;
  };
  for (const auto& t : scripts) {
    bool f1 = false, f2 = false;
    const std::string a = run(t, f1);
    const std::string b = run(t, f2);
    c.expect(f1 && f2, t.file + " transcript not fully consumed");
    c.expect(a == b, t.file + " output differs between runs");
    c.expect(a.find("[medium]") != std::string::npos, t.file + " default length tag");
    c.expect(a.find("mate not mapped") == std::string::npos, t.file + " mate scores map to 1");
  }

  for (int n = -30; n <= 30; ++n) {
    const double p = engine::score_to_winprob(engine::Score::mate(n));
    c.expect(p == 0.0 || p == 1.0, "mate " + std::to_string(n) + " -> " + fixed(p, 6));
  }
  c.expect(engine::score_to_winprob(engine::Score::mate(3)) == 1.0, "mate +3 -> 1");
  c.expect(engine::score_to_winprob(engine::Score::mate(-3)) == 0.0, "mate -3 -> 0");
  double worst = 0.0;
  for (int cp = -10000; cp <= 10000; ++cp) {
    const double s = engine::score_to_winprob(engine::Score::cp(cp)) + engine::score_to_winprob(engine::Score::cp(-cp));
    worst = std::max(worst, std::abs(s - 1.0));
  }
  c.expect(worst <= 1e-12, "logistic symmetry error " + std::to_string(worst));
  return finish(c, "3 transcripts byte-deterministic; mate -> {0,1}; max |w(cp)+w(-cp)-1| = " +
                       [&] {
                         std::ostringstream o;
                         o << worst;
                         return o.str();
                       }());
}

// ---- 6 ------------------------------------------------------------------

Result tag_extraction() {
  Check c;
  // SAN forms used in suggested lines.
  const BoardState dragon = play({"e4", "c5", "Nf3", "g6", "d4", "cxd4"});
  const auto qxd4 = chess::parse_san(dragon, "Qxd4");
  c.expect(qxd4.moving.kind == chess::PieceKind::Queen && qxd4.to.name() == "d4" && qxd4.capture,
           "Qxd4 is a queen capture on d4");

  // Commentary type.
  c.expect(tags::extract_commentary_type(C("Knight to e5.")).type == CommentaryType::MoveDescription,
           "Knight to e5. -> Move Description");
  c.expect(tags::extract_commentary_type(C("An inaccuracy for white as it leaves the rook hanging.")).type ==
               CommentaryType::MoveQuality,
           "leaves the rook hanging -> Move Quality");
  c.expect(tags::extract_commentary_type(C("Developing the knight would have been preferred.")).type ==
               CommentaryType::MoveComparison,
           "would have been preferred -> Move Comparison");
  // Quality markers.
  c.expect(tags::extract_move_quality_text(C("?? Drops the queen.")) == MoveQuality::Blunder, "?? -> Blunder");
  c.expect(tags::extract_move_quality_text(C("! A strong developing move.")) == MoveQuality::Good, "! -> Good");
  // Suggested moves.
  const auto lines = tags::extract_suggested_moves(C("Better was Qxd4 Bg7."), dragon);
  c.expect(lines && lines->size() == 1 && lines->front().moves == std::vector<std::string>{"Qxd4", "Bg7"},
           "Better was Qxd4 Bg7. -> [Qxd4, Bg7]");
  // Entities.
  c.expect(tags::extract_entities(C("Carlsen's favorite line.")).proper_nouns == std::vector<std::string>{"Carlsen's"},
           "Carlsen's");
  c.expect(tags::extract_entities(C("The Ruy Lopez appears.")).proper_nouns.empty(), "Ruy Lopez allow-listed");
  // Length.
  c.expect(tags::tag_length(C(words(5))) == LengthClass::Short, "5 tokens short");
  c.expect(tags::tag_length(C(words(12))) == LengthClass::Medium, "12 tokens medium");
  // Whole annotation.
  const auto a = tags::annotate(C("Knight to e5."), BoardState::initial());
  c.expect(a.tags.commentary_type == CommentaryType::MoveDescription && !a.tags.move_quality,
           "annotate Knight to e5.");

  // Property: every extracted line replays legally under the oracle generator.
  std::mt19937 rng(500);
  const char* prefixes[] = {"Better was", "Also possible is", "I would have played", "Maybe", "After",
                            "The engine likes", "Instead,"};
  const char* suffixes[] = {".", " with a good game.", ", keeping the balance.", "!", "", "?"};
  const char* junk[] = {"Ke9", "Qh9", "Nxz4", "Rd1", "Nf6", "e5", "exd5", "O-O-O", "Bb5+", "Qxf7#"};
  int commentaries = 0;
  std::size_t extracted = 0;
  while (commentaries < 500) {
    BoardState b = BoardState::initial();
    const int plies = static_cast<int>(rng() % 40);
    for (int p = 0; p < plies; ++p) {
      const auto moves = chess::legal_moves(b);
      if (moves.empty()) break;
      b = chess::apply_move(b, moves[rng() % moves.size()]);
    }
    if (!chess::has_legal_move(b)) continue;
    ++commentaries;
    std::string text = prefixes[rng() % std::size(prefixes)];
    BoardState cur = b;
    const int len = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < len; ++k) {
      const auto moves = chess::legal_moves(cur);
      if (rng() % 3 == 0 || moves.empty()) {
        text += std::string(" ") + junk[rng() % std::size(junk)];
      } else {
        const auto m = moves[rng() % moves.size()];
        text += " " + m.san;
        cur = chess::apply_move(cur, m);
      }
    }
    text += suffixes[rng() % std::size(suffixes)];
    const auto found = tags::extract_suggested_moves(C(text), b);
    if (!found) continue;
    for (const auto& line : *found) {
      ++extracted;
      auto o = oracle::from_fen(line.anchor.fen());
      BoardState replay = line.anchor;
      for (const auto& san : line.moves) {
        bool ok = false;
        try {
          const auto m = chess::parse_san(replay, san);
          const auto legal = oracle::legal_uci(replay.fen());
          ok = std::binary_search(legal.begin(), legal.end(), m.uci());
          replay = chess::apply_move(replay, m);
        } catch (const Error&) {
        }
        c.expect(ok, "illegal " + san + " extracted from \"" + text + "\"");
        if (!ok) break;
      }
      c.expect(line.anchor == b, "line anchored elsewhere: " + text);
    }
  }
  return finish(c, "published fixtures exact; " + std::to_string(extracted) + " lines from " +
                       std::to_string(commentaries) + " synthetic commentaries all legal");
}

// ---- 7 ------------------------------------------------------------------

Result forum_filter() {
  Check c;
  auto post = [](std::string response) {
    corpus::ForumPost p;
    p.thread = {"A question about my game."};
    p.response = std::move(response);
    return p;
  };
  auto has = [](const corpus::FilterDecision& d, corpus::ForumPattern p) {
    return std::find(d.patterns.begin(), d.patterns.end(), p) != d.patterns.end();
  };
  auto d = corpus::filter_forum_post(post("See https://example.com/game/123 for the full game with Nf3."));
  c.expect(!d.keep && d.drop_reason == "external-link", "external link dropped");
  d = corpus::filter_forum_post(post("around move 10 you lost a tempo"));
  c.expect(d.keep && has(d, corpus::ForumPattern::MoveNumber), "move 10 kept by pattern 2");
  d = corpus::filter_forum_post(post("nice fianchetto"));
  c.expect(d.keep && has(d, corpus::ForumPattern::EventToken), "fianchetto kept by pattern 3");
  // The published event list, with "discovered attack/en passant" as two entries.
  const std::vector<std::string> tokens = {"exchange",  "castle",     "capture",           "blunder",
                                           "mate",      "check",      "checkmate",         "discovered attack",
                                           "en passant", "fianchetto", "gambit",           "pin",
                                           "sacrifice", "stalemate",  "threat",            "trap",
                                           "variation"};
  const auto& mine = corpus::event_tokens();
  c.expect(std::set<std::string>(mine.begin(), mine.end()) == std::set<std::string>(tokens.begin(), tokens.end()),
           "event token list");
  for (const auto& t : tokens) {
    d = corpus::filter_forum_post(post("I think the " + t + " idea was the point here."));
    c.expect(d.keep && has(d, corpus::ForumPattern::EventToken), "event token " + t + " kept");
  }
  d = corpus::filter_forum_post(post("Thanks, that was really helpful for me."));
  c.expect(!d.keep && d.drop_reason == "no-pattern", "plain prose dropped");
  return finish(c, "external-link drop, \"move 10\" keep, " + std::to_string(tokens.size()) +
                       " event tokens keep, plain prose drop");
}

// ---- 8 ------------------------------------------------------------------

Result splits() {
  Check c;
  std::vector<corpus::TripletRecord> records(10000);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].game_id = "game-" + std::to_string(i);
    records[i].line = i + 1;
  }
  const corpus::SplitSpec spec{{85, 10, 5}, 20240611};
  const auto a = corpus::split_dataset(records, spec);
  const auto b = corpus::split_dataset(records, spec);
  c.expect(a.train.size() == 8500 && a.valid.size() == 1000 && a.test.size() == 500,
           "sizes " + std::to_string(a.train.size()) + "/" + std::to_string(a.valid.size()) + "/" +
               std::to_string(a.test.size()));
  auto lines = [](const std::vector<corpus::TripletRecord>& v) {
    std::vector<std::size_t> out;
    for (const auto& r : v) out.push_back(r.line);
    return out;
  };
  c.expect(lines(a.train) == lines(b.train) && lines(a.valid) == lines(b.valid) && lines(a.test) == lines(b.test),
           "same seed gives the same assignment");
  std::vector<int> seen(records.size() + 1, 0);
  for (const auto* part : {&a.train, &a.valid, &a.test})
    for (const auto& r : *part) ++seen[r.line];
  c.expect(std::all_of(seen.begin() + 1, seen.end(), [](int n) { return n == 1; }), "every record in exactly one split");

  std::vector<std::string> ids;
  for (const auto& r : records) ids.push_back(r.game_id);
  c.expect(corpus::assign_splits(ids, spec) == corpus::assign_splits(ids, spec), "assign_splits determinism");
  c.expect(corpus::assign_splits(ids, {{85, 10, 5}, spec.seed + 1}) != corpus::assign_splits(ids, spec),
           "another seed changes the assignment");

  std::vector<std::string> small(1800);
  for (std::size_t i = 0; i < small.size(); ++i) small[i] = "m" + std::to_string(i);
  const auto s = corpus::assign_splits(small, {{80, 10, 10}, 1});
  const auto n = [&](corpus::Split x) { return std::count(s.begin(), s.end(), x); };
  c.expect(n(corpus::Split::Train) == 1440 && n(corpus::Split::Valid) == 180 && n(corpus::Split::Test) == 180,
           "80:10:10 over 1,800 -> 1440/180/180");
  return finish(c, "10,000 records -> 8500/1000/500, disjoint and covering, deterministic per seed");
}

// ---- 9 ------------------------------------------------------------------

struct UniformOracle : backend::ScoreOracle {
  std::vector<double> score(std::string_view, const std::vector<std::string>& c) override {
    return std::vector<double>(c.size(), -2.5);
  }
};

struct RandomOneHotOracle : backend::ScoreOracle {
  std::mt19937_64 rng{64};
  std::vector<double> score(std::string_view, const std::vector<std::string>& c) override {
    std::vector<double> lp(c.size(), -80.0);
    lp[std::uniform_int_distribution<std::size_t>(0, c.size() - 1)(rng)] = 0.0;
    return lp;
  }
};

Result belief_probe() {
  const auto start = Clock::now();
  Check c;
  c.expect(probe::build_prompts(BoardState::initial()).size() == 12, "initial position gives 12 prompts");

  UniformOracle uniform;
  std::mt19937 rng(9);
  std::size_t uniform_prompts = 0;
  for (int i = 0; i < 300; ++i) {
    BoardState b = BoardState::initial();
    const int plies = static_cast<int>(rng() % 100);
    for (int p = 0; p < plies; ++p) {
      const auto moves = chess::legal_moves(b);
      if (moves.empty()) break;
      b = chess::apply_move(b, moves[rng() % moves.size()]);
    }
    for (const auto& prompt : probe::build_prompts(b)) {
      const auto s = probe::belief_state(uniform, prompt, b);
      ++uniform_prompts;
      bool all = true;
      for (double p : s.distribution) all = all && p == 1.0 / 64.0;
      c.expect(all, "uniform entries are 1/64");
      // Valid squares counted independently of the library.
      std::size_t valid = 0;
      for (const auto& sq : chess::all_squares()) {
        const auto piece = b.at(sq);
        valid += piece && piece->color == prompt.color && piece->kind == prompt.kind;
      }
      c.expect(s.valid_squares.size() == valid, "valid squares for " + prompt.text);
      c.expect(s.weight_on_valid() == static_cast<double>(valid) / 64.0, "weight |valid|/64 for " + prompt.text);
    }
  }

  // Kings-only boards: one valid square per prompt, so chance is exactly 1/64.
  RandomOneHotOracle random;
  std::vector<probe::BeliefState> states;
  while (states.size() < 20000) {
    const auto w = chess::Square::from_index(static_cast<int>(rng() % 64));
    const auto k = chess::Square::from_index(static_cast<int>(rng() % 64));
    if (std::abs(w.file() - k.file()) <= 1 && std::abs(w.rank() - k.rank()) <= 1) continue;
    const BoardState b = BoardState::Builder()
                             .put(w, {chess::Color::White, chess::PieceKind::King})
                             .put(k, {chess::Color::Black, chess::PieceKind::King})
                             .build();
    for (const auto& prompt : probe::build_prompts(b)) states.push_back(probe::belief_state(random, prompt, b));
  }
  const auto m = probe::probe_metrics(states);
  const double p = 1.0 / 64.0;
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(states.size()));
  c.expect(std::abs(m.argmax_accuracy - p) <= 3.0 * sigma,
           "argmax accuracy " + fixed(m.argmax_accuracy, 5) + " outside 1/64 +- " + fixed(3 * sigma, 5));
  const double secs = seconds_since(start);
  c.expect(secs < 120.0, "runtime " + fixed(secs, 1) + " s");
  return finish(c, "uniform law exact on " + std::to_string(uniform_prompts) + " prompts; random one-hot accuracy " +
                       fixed(m.argmax_accuracy, 4) + " (weight " + fixed(m.weight_on_valid, 4) + ") over " +
                       std::to_string(states.size()) + " prompts, 1/64 = 0.0156 +- " + fixed(3 * sigma, 4) + "; " +
                       fixed(secs, 1) + " s");
}

// ---- 10 -----------------------------------------------------------------

Result end_to_end() {
  Check c;
  std::ifstream in(kData + "/acceptance/infer_positions.jsonl");
  c.expect(static_cast<bool>(in), "fixture file missing");
  engine::EngineConfig config;
  config.executable = FAKE_UCI_ENGINE;
  config.multipv = 2;
  config.budget = engine::SearchBudget::nodes(2000);
  auto session = engine::EngineSession::open(config);

  int positions = 0;
  std::size_t violations = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    ++positions;
    std::optional<LengthClass> length;
    if (j.contains("length")) length = parse_length_class(j["length"].get<std::string>());
    const auto req = inference::InferenceRequest::from_fen(j["fen"].get<std::string>(), j["move"].get<std::string>(),
                                                          *parse_commentary_type(j["type"].get<std::string>()),
                                                          length);
    const auto r = inference::infer(session, req);
    const auto again = inference::ground_check(r.text, req.board(), req.move);
    violations += r.report.violations.size();
    const std::string where = j["fen"].get<std::string>() + " " + j["move"].get<std::string>();
    c.expect(r.report.ok() && again.ok(), "violations for " + where + ": " + r.text);
    c.expect(r.backend == "template", "backend " + r.backend);
    c.expect(tags::length_class(tags::count_tokens(r.text)) == length.value_or(LengthClass::Medium),
             "length class for " + where);
    const std::string& input = r.prepared.input.text;
    c.expect(input.find("[Pronoun]") == std::string::npos && input.find("[Proper Noun]") == std::string::npos,
             "entity tags in input for " + where);
    if (!length) c.expect(input.size() >= 8 && input.substr(input.size() - 8) == "[medium]", "default [medium]");
    if (r.prepared.tags.suggested) {
      const auto m = chess::parse_san(req.board(), r.prepared.tags.suggested->front().moves.front());
      const auto legal = oracle::legal_uci(req.board().fen());
      c.expect(std::binary_search(legal.begin(), legal.end(), m.uci()), "suggested move legal for " + where);
    }
  }
  session.quit();
  c.expect(positions == 50, "expected 50 fixture positions, found " + std::to_string(positions));
  return finish(c, std::to_string(positions) + " positions, " + std::to_string(violations) +
                       " grounding violations (template backend, fake UCI engine process)");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"chess-kernel", chess_kernel},
      {"representation-fidelity", representation},
      {"length-tagging", length_tagging},
      {"quality-classification", quality_classification},
      {"engine-adapter", engine_adapter},
      {"tag-extraction", tag_extraction},
      {"forum-filter", forum_filter},
      {"splits", splits},
      {"belief-probe", belief_probe},
      {"end-to-end-template", end_to_end},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r{false, ""};
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.pass) ++failed;
    std::cout << (r.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << r.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
