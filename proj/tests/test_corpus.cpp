#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include <unistd.h>

#include "chesscomm/corpus.hpp"

using namespace chesscomm;
using namespace chesscomm::corpus;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& content) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("chesscomm_corpus_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".jsonl");
    std::ofstream(path) << content;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

const char* kDragon =
    R"({"moves":["e4","c5","Nf3","g6","d4","cxd4"],"move":"Nxd4","commentary":"?? Better was Qxd4.","source":"fixture/dragon"})";
const char* kCastle =
    R"({"moves":["e4","e5","Nf3","Nc6","Bc4","Bc5"],"move":"O-O","commentary":"White castles.","source":"fixture/italian"})";

ForumPost post(std::string response, std::vector<std::string> thread = {}) {
  ForumPost p;
  p.response = std::move(response);
  p.thread = std::move(thread);
  return p;
}

bool has(const FilterDecision& d, ForumPattern p) {
  return std::find(d.patterns.begin(), d.patterns.end(), p) != d.patterns.end();
}

}  // namespace

TEST_CASE("parse a triplet line") {
  const TripletRecord r = parse_triplet(kDragon, 4);
  CHECK(r.game.plies.size() == 6);
  CHECK(r.move.san == "Nxd4");
  CHECK(r.commentary.text == "?? Better was Qxd4.");
  CHECK(r.commentary.ply_index == 6);
  CHECK(r.source == "fixture/dragon");
  CHECK(r.game_id == "fixture/dragon");
  CHECK(r.line == 4);
  CHECK(parse_triplet(to_jsonl(r)).anchor() == r.anchor());
  CHECK(to_jsonl(parse_triplet(to_jsonl(r))) == to_jsonl(r));

  const auto g = parse_triplet(
      R"({"moves":[],"move":"Kd2","commentary":"","source":"s","game":"g1","fen":"8/8/8/8/8/8/8/4K2k w - - 0 1"})");
  CHECK(g.game_id == "g1");
  CHECK(g.move.san == "Kd2");
  CHECK(parse_triplet(to_jsonl(g)).game_id == "g1");
}

TEST_CASE("triplet errors carry line numbers") {
  try {
    parse_triplet(R"({"moves":["e4","e4"],"move":"e5","commentary":"","source":"s"})", 12);
    FAIL("expected IllegalMove");
  } catch (const IllegalMove& e) {
    CHECK(e.line() == 12);
    CHECK(std::string(e.what()).find("ply 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_triplet(R"({"moves":[],"move":"Ke2","commentary":"","source":"s"})"), IllegalMove);
  CHECK_THROWS_AS(parse_triplet("{\"moves\": [", 3), JsonSyntax);
  CHECK_THROWS_AS(parse_triplet(R"({"moves":[],"move":"e4","source":"s"})"), MalformedRecord);
  CHECK_THROWS_AS(parse_triplet(R"({"moves":"e4","move":"e4","commentary":"","source":"s"})"), MalformedRecord);
  CHECK_THROWS_AS(parse_triplet("[1,2]"), MalformedRecord);
}

TEST_CASE("load triplets") {
  SUBCASE("empty file") {
    TempFile f("");
    const auto r = load_triplets(f.path);
    CHECK(r.records.empty());
    CHECK(r.issues.empty());
  }
  SUBCASE("lenient skips and reports") {
    TempFile f(std::string(kDragon) + "\n\n" +
               R"({"moves":[],"move":"e5","commentary":"x","source":"bad"})" + "\nnot json\n" + kCastle + "\n");
    const auto r = load_triplets(f.path);
    REQUIRE(r.records.size() == 2);
    CHECK(r.records[0].line == 1);
    CHECK(r.records[1].line == 5);
    REQUIRE(r.issues.size() == 2);
    CHECK(r.issues[0].line == 3);
    CHECK(r.issues[1].line == 4);
  }
  SUBCASE("strict aborts") {
    TempFile f(std::string(kDragon) + "\n" + R"({"moves":[],"move":"e5","commentary":"x","source":"bad"})" + "\n");
    try {
      load_triplets(f.path, true);
      FAIL("expected IllegalMove");
    } catch (const IllegalMove& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_triplets("/nonexistent/triplets.jsonl"), IoFailure);
  }
}

TEST_CASE("forum filter fixtures") {
  auto d = filter_forum_post(post("around move 10 you lost a tempo"));
  CHECK(d.keep);
  CHECK(has(d, ForumPattern::MoveNumber));

  d = filter_forum_post(post("nice fianchetto"));
  CHECK(d.keep);
  CHECK(has(d, ForumPattern::EventToken));

  d = filter_forum_post(post("See https://example.com/game/123 for the full game with Nf3."));
  CHECK_FALSE(d.keep);
  CHECK(d.drop_reason == "external-link");

  d = filter_forum_post(post("Good question, the opening is fine.", {"What about www.example.org?"}));
  CHECK_FALSE(d.keep);
  CHECK(d.drop_reason == "external-link");

  d = filter_forum_post(post("Thanks, that was really helpful for me."));
  CHECK_FALSE(d.keep);
  CHECK(d.drop_reason == "no-pattern");
  CHECK(d.patterns.empty());

  for (const std::string& token : event_tokens()) {
    CAPTURE(token);
    d = filter_forum_post(post("I think the " + token + " idea was the point here."));
    CHECK(d.keep);
    CHECK(has(d, ForumPattern::EventToken));
    CHECK(std::find(d.matches.begin(), d.matches.end(), "3:" + token) != d.matches.end());
  }
  CHECK(event_tokens().size() == 17);
}

TEST_CASE("forum filter patterns") {
  auto d = filter_forum_post(post("After 1.e4 c5 the game gets sharp."));
  CHECK(has(d, ForumPattern::Notation));
  d = filter_forum_post(post("Why not Qxd4!? instead"));
  CHECK(has(d, ForumPattern::Notation));
  d = filter_forum_post(post("Your bishops are strong"));
  CHECK(d.keep);
  CHECK(d.patterns == std::vector<ForumPattern>{ForumPattern::PieceToken});
  d = filter_forum_post(post("HE CASTLED LONG AND GOT PINNED"));
  CHECK(d.keep);
  CHECK(d.patterns == std::vector<ForumPattern>{ForumPattern::EventToken});
  d = filter_forum_post(post("he was checking his phone"));
  CHECK(has(d, ForumPattern::EventToken));
  d = filter_forum_post(post("my teammate and I went to the pinball arcade"));
  CHECK_FALSE(d.keep);

  FilterConfig internal;
  internal.internal_hosts = {"chess.stackexchange.com"};
  d = filter_forum_post(post("see https://chess.stackexchange.com/q/1 about the pin"), internal);
  CHECK(d.keep);

  FilterConfig tags;
  tags.irrelevant_tags = {"Chess-Engines"};
  ForumPost p = post("the pin on e5 matters");
  p.tags = {"chess-engines"};
  d = filter_forum_post(p, tags);
  CHECK_FALSE(d.keep);
  CHECK(d.drop_reason == "irrelevant-tag");
}

TEST_CASE("forum filter is pure and monotone") {
  std::mt19937 rng(7);
  const std::vector<std::string> prose{"the", "was", "very", "nice", "I", "liked", "it", "today",
                                       "thanks", "for", "sharing", "good", "luck", "everyone"};
  const std::vector<std::string> additions{"move 23", "pin", "Nf3", "rook", "en passant", "gambits"};
  for (int i = 0; i < 300; ++i) {
    std::string text;
    const int n = 3 + static_cast<int>(rng() % 10);
    for (int k = 0; k < n; ++k) text += prose[rng() % prose.size()] + " ";
    const auto before = filter_forum_post(post(text));
    CHECK(filter_forum_post(post(text)).patterns == before.patterns);
    const auto after = filter_forum_post(post(text + additions[rng() % additions.size()]));
    CHECK(after.keep);
    for (auto p : before.patterns) CHECK(has(after, p));
  }
}

TEST_CASE("scrub pii") {
  CHECK(scrub_pii("email me at a@b.com") == "email me at [EMAIL]");
  CHECK(scrub_pii("u/somePlayer said") == "[USER] said");
  CHECK(scrub_pii("as /u/some_player noted") == "as [USER] noted");
  CHECK(scrub_pii("thanks @magnus_fan!") == "thanks [USER]!");
  CHECK(scrub_pii("see https://lichess.org/abc?x=1 and www.chess.com.") == "see [URL] and [URL].");
  CHECK(scrub_pii("21. Qxd4!") == "21. Qxd4!");

  const std::vector<std::string> samples{
      "1. e4 e5 2. Nf3 Nc6 3. Bb5 a6 4. Ba4 Nf6 5. O-O Be7",
      "Contact j.doe+chess@mail.example.co.uk or @jd, u/jd, http://x.y/z",
      "e8=Q+ and exd6 e.p. then 0-0-0#",
      "[EMAIL] [URL] [USER] already scrubbed",
      "mixed: Rxe1+?? @x a@b.cd https://q.r u/Q_9"};
  for (const auto& s : samples) {
    CAPTURE(s);
    const std::string once = scrub_pii(s);
    CHECK(scrub_pii(once) == once);
    CHECK(once.find('@') == std::string::npos);
  }
  CHECK(scrub_pii(samples[0]) == samples[0]);
  CHECK(scrub_pii(samples[2]) == samples[2]);
}

TEST_CASE("annotate corpus") {
  const std::vector<TripletRecord> records{parse_triplet(kDragon, 1), parse_triplet(kCastle, 2)};
  const std::vector<repr::RepresentationConfig> ablations{repr::RepresentationConfig::fully(),
                                                          repr::RepresentationConfig::unconditioned()};
  AnnotateSummary summary;
  const auto out = annotate_corpus(records, {}, ablations, &summary);
  REQUIRE(out.size() == 2);
  CHECK(summary.records == 2);

  const TagSet& t = out[0].annotation.tags;
  CHECK(t.move_quality == MoveQuality::Blunder);
  REQUIRE(t.suggested);
  CHECK(t.suggested->at(0).moves == std::vector<std::string>{"Qxd4"});
  const std::string& fully = out[0].inputs[0].second.text;
  CHECK(out[0].inputs[0].first == repr::Ablation::Fully);
  CHECK(fully.find("[Move Quality] Blunder") != std::string::npos);
  const std::string tail = "[Suggested Move] Qxd4 [short]";
  CHECK(fully.compare(fully.size() - tail.size(), tail.size(), tail) == 0);
  CHECK(out[0].inputs[1].second.text == "[Unconditioned]");

  const TagSet& c = out[1].annotation.tags;
  CHECK(c.commentary_type == CommentaryType::MoveDescription);
  CHECK(c.length == LengthClass::Short);
  CHECK_FALSE(c.move_quality);
  CHECK_FALSE(c.suggested);
  CHECK(out[1].inputs[1].second.text == "[Unconditioned]");

  const std::string line = to_jsonl(out[0]);
  CHECK(line.find("\"fully\":") != std::string::npos);
  const TagSet back = tagset_from_json(line);
  CHECK(back.move_quality == t.move_quality);
  CHECK(back.commentary_type == t.commentary_type);
  CHECK(back.length == t.length);
  REQUIRE(back.suggested);
  CHECK(back.suggested->at(0).moves == t.suggested->at(0).moves);
}

TEST_CASE("annotation keeps records with warnings") {
  std::vector<TripletRecord> records;
  records.push_back(parse_triplet(
      R"({"moves":["e4"],"move":"e5","commentary":"Instead Nf6 Qxh7 was possible.","source":"w"})"));
  records.push_back(parse_triplet(kCastle));
  AnnotateSummary summary;
  const auto out = annotate_corpus(records, {}, {repr::RepresentationConfig::move_only()}, &summary);
  CHECK(out.size() == records.size());
  CHECK(summary.with_warnings == 1);
  CHECK(summary.warnings_by_extractor["suggested_moves"] == 1);
}

TEST_CASE("split ratios") {
  CHECK(SplitSpec::parse_ratios("85:10:5") == std::array<int, 3>{85, 10, 5});
  CHECK_THROWS_AS(SplitSpec::parse_ratios("85:10"), Error);
  CHECK_THROWS_AS(SplitSpec::parse_ratios("85:10:5:0"), Error);
  CHECK_THROWS_AS(SplitSpec::parse_ratios("85:-10:25"), Error);
  CHECK_THROWS_AS((SplitSpec{{80, 10, 5}, 0}.validate()), Error);
  CHECK_NOTHROW((SplitSpec{{100, 0, 0}, 0}.validate()));
}

namespace {

std::array<std::size_t, 3> sizes(const std::vector<Split>& s) {
  std::array<std::size_t, 3> c{};
  for (Split x : s) ++c[static_cast<int>(x)];
  return c;
}

std::vector<std::string> singleton_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("game-" + std::to_string(i));
  return ids;
}

}  // namespace

TEST_CASE("split sizes") {
  CHECK(sizes(assign_splits(singleton_ids(100), {{85, 10, 5}, 1})) == std::array<std::size_t, 3>{85, 10, 5});
  CHECK(sizes(assign_splits(singleton_ids(1800), {{80, 10, 10}, 1})) ==
        std::array<std::size_t, 3>{1440, 180, 180});
  // floor quotas, remainder to train
  CHECK(sizes(assign_splits(singleton_ids(7), {{85, 10, 5}, 1})) == std::array<std::size_t, 3>{7, 0, 0});
  CHECK(sizes(assign_splits(singleton_ids(33), {{34, 33, 33}, 1})) == std::array<std::size_t, 3>{13, 10, 10});
  CHECK(assign_splits({}, {}).empty());
}

TEST_CASE("split determinism, grouping and order independence") {
  std::mt19937 rng(11);
  std::vector<std::string> ids;
  for (int i = 0; i < 10000; ++i) ids.push_back("g" + std::to_string(rng() % 1500));
  const SplitSpec spec{{85, 10, 5}, 42};
  const auto a = assign_splits(ids, spec);
  CHECK(a == assign_splits(ids, spec));

  std::map<std::string, std::set<Split>> per_game;
  for (std::size_t i = 0; i < ids.size(); ++i) per_game[ids[i]].insert(a[i]);
  for (const auto& [id, s] : per_game) CHECK(s.size() == 1);
  const auto c = sizes(a);
  CHECK(c[0] + c[1] + c[2] == ids.size());
  CHECK(c[1] <= 1000);
  CHECK(c[2] <= 500);
  CHECK(c[1] > 900);
  CHECK(c[2] > 400);

  std::vector<std::size_t> perm(ids.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::string> shuffled;
  for (auto i : perm) shuffled.push_back(ids[i]);
  const auto b = assign_splits(shuffled, spec);
  for (std::size_t k = 0; k < perm.size(); ++k) CHECK(b[k] == a[perm[k]]);

  CHECK(assign_splits(ids, {{85, 10, 5}, 43}) != a);
}

TEST_CASE("split dataset of records") {
  std::vector<TripletRecord> records;
  const TripletRecord base = parse_triplet(kCastle);
  for (int i = 0; i < 200; ++i) {
    TripletRecord r = base;
    r.game_id = "game" + std::to_string(i / 2);
    records.push_back(r);
  }
  const auto s = split_dataset(records, {{85, 10, 5}, 3});
  CHECK(s.train.size() + s.valid.size() + s.test.size() == 200);
  CHECK(s.valid.size() == 20);
  CHECK(s.test.size() == 10);
  std::set<std::string> train_games;
  for (const auto& r : s.train) train_games.insert(r.game_id);
  for (const auto& r : s.valid) CHECK(train_games.count(r.game_id) == 0);
  for (const auto& r : s.test) CHECK(train_games.count(r.game_id) == 0);
}

TEST_CASE("macro f1") {
  const std::vector<std::string> gold{"A", "A", "A", "B", "B", "C"};
  const std::vector<std::string> pred{"A", "A", "B", "B", "C", "C"};
  // Per class: A 2TP/1FN -> 0.8, B 1TP/1FP/1FN -> 0.5, C 1TP/1FP -> 2/3.
  CHECK(macro_f1(pred, gold) == doctest::Approx(59.0 / 90.0).epsilon(1e-12));
  CHECK(macro_f1(gold, gold) == 1.0);
  CHECK(macro_f1({"B", "C", "A"}, {"A", "B", "C"}) == 0.0);
  CHECK(macro_f1({"", ""}, {"A", "B"}) == 0.0);
  CHECK_THROWS_AS(macro_f1({"A"}, {"A", "B"}), LengthMismatch);
}

TEST_CASE("evaluate extractor") {
  TagSet a;
  a.commentary_type = CommentaryType::MoveQuality;
  a.move_quality = MoveQuality::Blunder;
  a.suggested = std::vector<SuggestedLine>{{{"Qxd4", "Bg7"}, {}, {}}};
  a.length = LengthClass::Short;
  TagSet b;
  b.commentary_type = CommentaryType::MoveDescription;
  b.length = LengthClass::Medium;
  b.pronouns = {"he"};

  const auto same = evaluate_extractor({a, b}, {a, b});
  CHECK(same.examples == 2);
  CHECK(same.commentary_type_f1 == 1.0);
  CHECK(same.move_quality_f1 == 1.0);
  CHECK(same.suggested_exact == 1.0);
  CHECK(same.pronoun_exact == 1.0);
  CHECK_FALSE(same.proper_noun_exact);

  TagSet a2 = a;
  a2.suggested = std::vector<SuggestedLine>{{{"Qxd4"}, {}, {}}};
  a2.commentary_type = CommentaryType::MoveDescription;
  a2.move_quality = MoveQuality::Mistake;
  TagSet b2 = b;
  b2.commentary_type = CommentaryType::MoveQuality;
  const auto wrong = evaluate_extractor({a2, b2}, {a, b});
  CHECK(wrong.commentary_type_f1 == 0.0);
  CHECK(wrong.move_quality_f1 == 0.0);
  CHECK(wrong.suggested_exact == 0.0);
  CHECK(wrong.length_f1 == 1.0);

  CHECK_THROWS_AS(evaluate_extractor({a}, {a, b}), LengthMismatch);
  const std::string j = to_json(same);
  CHECK(j.find("\"proper_noun_exact\":null") != std::string::npos);
}

TEST_CASE("tag set json") {
  const TagSet t = tagset_from_json(
      R"({"commentary_type":"Move Quality","move_quality":"Good","suggested":["Ne4",["Nf3","d5"]],"length":"long"})");
  CHECK(t.commentary_type == CommentaryType::MoveQuality);
  CHECK(t.move_quality == MoveQuality::Good);
  REQUIRE(t.suggested);
  CHECK(t.suggested->size() == 2);
  CHECK(t.suggested->at(1).moves == std::vector<std::string>{"Nf3", "d5"});
  CHECK(t.length == LengthClass::Long);
  CHECK(tagset_from_json(tagset_to_json(t)).suggested->at(1).moves == t.suggested->at(1).moves);
  CHECK_THROWS_AS(tagset_from_json(R"({"move_quality":"Superb"})"), MalformedRecord);
  CHECK_THROWS_AS(tagset_from_json("{"), JsonSyntax);
}
