#include "chesscomm/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"

namespace chesscomm::corpus {

using json = nlohmann::ordered_json;

namespace {

json parse_json_line(std::string_view line, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw JsonSyntax(e.what(), line_no);
  }
}

const json& field(const json& j, const char* name, json::value_t type, std::size_t line_no) {
  auto it = j.find(name);
  if (it == j.end()) throw MalformedRecord(std::string("missing \"") + name + "\"", line_no);
  if (it->type() != type) throw MalformedRecord(std::string("bad type for \"") + name + "\"", line_no);
  return *it;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

// ---- triplets -----------------------------------------------------------

TripletRecord parse_triplet(std::string_view line, std::size_t line_no) {
  const json j = parse_json_line(line, line_no);
  if (!j.is_object()) throw MalformedRecord("record is not an object", line_no);
  const json& moves = field(j, "moves", json::value_t::array, line_no);
  const std::string move = field(j, "move", json::value_t::string, line_no).get<std::string>();
  TripletRecord r;
  r.commentary.text = field(j, "commentary", json::value_t::string, line_no).get<std::string>();
  r.source = field(j, "source", json::value_t::string, line_no).get<std::string>();
  r.game_id = r.source;
  if (auto g = j.find("game"); g != j.end()) {
    if (!g->is_string()) throw MalformedRecord("bad type for \"game\"", line_no);
    r.game_id = g->get<std::string>();
  }
  r.line = line_no;

  if (auto f = j.find("fen"); f != j.end()) {
    if (!f->is_string()) throw MalformedRecord("bad type for \"fen\"", line_no);
    try {
      r.game.start = chess::BoardState::from_fen(f->get<std::string>());
    } catch (const chess::ChessError& e) {
      throw MalformedRecord(e.what(), line_no);
    }
  }
  chess::BoardState board = r.game.start;
  auto play = [&](const std::string& san, std::size_t ply) {
    try {
      return chess::parse_san(board, san);
    } catch (const chess::ChessError& e) {
      throw IllegalMove("ply " + std::to_string(ply) + " \"" + san + "\": " + e.what(), line_no);
    }
  };
  std::size_t ply = 1;
  for (const json& m : moves) {
    if (!m.is_string()) throw MalformedRecord("non-string entry in \"moves\"", line_no);
    const chess::MoveRecord rec = play(m.get<std::string>(), ply++);
    r.game.push(rec);
    board = chess::apply_move(board, rec);
  }
  r.move = play(move, ply);
  r.commentary.ply_index = r.game.plies.size();
  r.commentary.game = r.game_id;
  return r;
}

std::string to_jsonl(const TripletRecord& record) {
  json j;
  json moves = json::array();
  for (const auto& m : record.game.plies) moves.push_back(m.san);
  j["moves"] = moves;
  j["move"] = record.move.san;
  j["commentary"] = record.commentary.text;
  j["source"] = record.source;
  if (record.game_id != record.source) j["game"] = record.game_id;
  if (!(record.game.start == chess::BoardState::initial())) j["fen"] = record.game.start.fen();
  return j.dump();
}

TripletReader::TripletReader(const std::filesystem::path& path, bool strict)
    : in_(path), strict_(strict) {
  if (!in_) throw IoFailure("cannot open " + path.string());
}

std::optional<TripletRecord> TripletReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (is_blank(line)) continue;
    try {
      return parse_triplet(line, line_no_);
    } catch (const RecordError& e) {
      if (strict_) throw;
      issues_.push_back({e.line(), e.what()});
    }
  }
  if (in_.bad()) throw IoFailure("read error at line " + std::to_string(line_no_ + 1));
  return std::nullopt;
}

LoadResult load_triplets(const std::filesystem::path& path, bool strict) {
  TripletReader reader(path, strict);
  LoadResult out;
  while (auto r = reader.next()) out.records.push_back(std::move(*r));
  out.issues = reader.issues();
  return out;
}

// ---- forum posts --------------------------------------------------------

ForumPost parse_forum_post(std::string_view line, std::size_t line_no) {
  const json j = parse_json_line(line, line_no);
  if (!j.is_object()) throw MalformedRecord("post is not an object", line_no);
  ForumPost p;
  p.response = field(j, "response", json::value_t::string, line_no).get<std::string>();
  if (is_blank(p.response)) throw MalformedRecord("empty response", line_no);
  if (auto t = j.find("thread"); t != j.end()) {
    if (!t->is_array()) throw MalformedRecord("bad type for \"thread\"", line_no);
    for (const json& s : *t) {
      if (!s.is_string()) throw MalformedRecord("non-string entry in \"thread\"", line_no);
      p.thread.push_back(s.get<std::string>());
    }
  }
  if (auto v = j.find("votes"); v != j.end() && v->is_number_integer()) p.votes = v->get<int>();
  if (auto t = j.find("tags"); t != j.end() && t->is_array()) {
    for (const json& s : *t)
      if (s.is_string()) p.tags.push_back(s.get<std::string>());
  }
  return p;
}

const std::vector<std::string>& event_tokens() {
  static const std::vector<std::string> tokens{
      "exchange", "castle",   "capture",    "blunder", "mate",     "check",
      "checkmate", "discovered attack", "en passant", "fianchetto", "gambit", "pin",
      "sacrifice", "stalemate", "threat",   "trap",    "variation"};
  return tokens;
}

namespace {

const std::regex& url_regex() {
  static const std::regex re(R"((?:https?|ftp)://[^\s<>"')\]]*[^\s<>"')\].,;:!?]|\bwww\.[^\s<>"')\]]*[^\s<>"')\].,;:!?])",
                             std::regex::icase);
  return re;
}

// Host part of a matched URL, lower case.
std::string url_host(std::string url) {
  url = lower(url);
  if (auto p = url.find("://"); p != std::string::npos) url = url.substr(p + 3);
  const auto end = url.find_first_of("/?#:");
  return url.substr(0, end);
}

bool host_is_internal(const std::string& host, const std::vector<std::string>& internal) {
  for (const std::string& h : internal) {
    const std::string l = lower(h);
    if (host == l) return true;
    if (host.size() > l.size() && host.compare(host.size() - l.size(), l.size(), l) == 0 &&
        host[host.size() - l.size() - 1] == '.')
      return true;
  }
  return false;
}

// Event-token regex: the token with common inflections, whole words only.
std::regex inflected(const std::string& token) {
  // "castling", "pinned", "trapped".
  std::string alt = "|" + token + token.back() + "(?:ed|ing)";
  if (token.back() == 'e') alt += "|" + token.substr(0, token.size() - 1) + "(?:ing|ed|er|es)";
  std::string body = token;
  for (std::size_t p = 0; (p = body.find(' ', p)) != std::string::npos; p += 3)
    body.replace(p, 1, "\\s+");
  return std::regex("\\b(?:" + body + "(?:s|es|ed|ing|d)?" + alt + ")\\b");
}

const std::vector<std::pair<std::string, std::regex>>& event_regexes() {
  static const std::vector<std::pair<std::string, std::regex>> res = [] {
    std::vector<std::pair<std::string, std::regex>> v;
    for (const auto& t : event_tokens()) v.emplace_back(t, inflected(t));
    return v;
  }();
  return res;
}

const std::regex& move_number_regex() {
  static const std::regex re(R"(\bmoves?\s+(?:no\.?\s*|number\s+|#\s*)?\d+\b)");
  return re;
}

const std::regex& piece_regex() {
  static const std::regex re(R"(\b(king|queen|rook|bishop|knight|pawn)s?\b)");
  return re;
}

// Movetext tokens such as "12." / "12..." / "1.e4" lose their number.
std::string_view strip_move_number(std::string_view w) {
  std::size_t i = 0;
  while (i < w.size() && std::isdigit(static_cast<unsigned char>(w[i]))) ++i;
  if (i == 0 || i == w.size() || w[i] != '.') return w;
  while (i < w.size() && w[i] == '.') ++i;
  return w.substr(i);
}

std::string_view trim_punct(std::string_view w) {
  auto edge = [](char c) {
    return c == '(' || c == ')' || c == '"' || c == '\'' || c == ',' || c == ';' || c == ':' ||
           c == '[' || c == ']' || c == '{' || c == '}';
  };
  while (!w.empty() && edge(w.front())) w.remove_prefix(1);
  while (!w.empty() && edge(w.back())) w.remove_suffix(1);
  // A sentence-final period after a move; "!" and "?" are handled by san_shaped.
  while (!w.empty() && w.back() == '.') w.remove_suffix(1);
  return w;
}

std::optional<std::string> notation_token(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    const std::string_view w = trim_punct(strip_move_number(trim_punct(word)));
    if (!w.empty() && tags::san_shaped(w)) return std::string(w);
  }
  return std::nullopt;
}

}  // namespace

FilterDecision filter_forum_post(const ForumPost& post, const FilterConfig& config) {
  FilterDecision d;
  for (const std::string& t : post.tags) {
    const std::string lt = lower(t);
    for (const std::string& bad : config.irrelevant_tags) {
      if (lt == lower(bad)) {
        d.drop_reason = "irrelevant-tag";
        d.matches.push_back("tag:" + t);
        return d;
      }
    }
  }
  std::vector<const std::string*> texts;
  for (const auto& s : post.thread) texts.push_back(&s);
  texts.push_back(&post.response);
  for (const std::string* s : texts) {
    for (std::sregex_iterator it(s->begin(), s->end(), url_regex()), end; it != end; ++it) {
      if (!host_is_internal(url_host(it->str()), config.internal_hosts)) {
        d.drop_reason = "external-link";
        d.matches.push_back("link:" + it->str());
        return d;
      }
    }
  }

  const std::string& text = post.response;
  const std::string low = lower(text);
  std::set<ForumPattern> found;
  if (auto t = notation_token(text)) {
    found.insert(ForumPattern::Notation);
    d.matches.push_back("1:" + *t);
  }
  std::smatch m;
  if (std::regex_search(low, m, move_number_regex())) {
    found.insert(ForumPattern::MoveNumber);
    d.matches.push_back("2:" + m.str());
  }
  for (const auto& [token, re] : event_regexes()) {
    if (std::regex_search(low, re)) {
      found.insert(ForumPattern::EventToken);
      d.matches.push_back("3:" + token);
    }
  }
  if (std::regex_search(low, m, piece_regex())) {
    found.insert(ForumPattern::PieceToken);
    d.matches.push_back("4:" + m.str(1));
  }
  d.patterns.assign(found.begin(), found.end());
  d.keep = !d.patterns.empty();
  if (!d.keep) d.drop_reason = "no-pattern";
  return d;
}

std::string scrub_pii(std::string_view text) {
  static const std::regex email(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,})");
  static const std::regex reddit(R"((^|[^A-Za-z0-9_/])/?u/[A-Za-z0-9_-]+)");
  static const std::regex handle(R"((^|[^A-Za-z0-9_.\]])@[A-Za-z0-9_]+)");
  std::string s = std::regex_replace(std::string(text), url_regex(), "[URL]");
  s = std::regex_replace(s, email, "[EMAIL]");
  s = std::regex_replace(s, reddit, "$1[USER]");
  s = std::regex_replace(s, handle, "$1[USER]");
  return s;
}

// ---- annotation ---------------------------------------------------------

AnnotatedRecord annotate_record(const TripletRecord& record, const tags::ExtractorSet& extractors,
                                const std::vector<repr::RepresentationConfig>& ablations) {
  AnnotatedRecord out;
  out.record = &record;
  const chess::BoardState anchor = record.anchor();
  out.annotation = tags::annotate(record.commentary, anchor, extractors);
  for (const auto& config : ablations) {
    out.inputs.emplace_back(config.ablation, repr::render_input(record.game, anchor, record.move,
                                                                out.annotation.tags, config));
  }
  return out;
}

void AnnotateSummary::add(const AnnotatedRecord& r) {
  ++records;
  if (!r.annotation.warnings.empty()) ++with_warnings;
  for (const auto& w : r.annotation.warnings) ++warnings_by_extractor[w.extractor];
}

std::vector<AnnotatedRecord> annotate_corpus(const std::vector<TripletRecord>& records,
                                             const tags::ExtractorSet& extractors,
                                             const std::vector<repr::RepresentationConfig>& ablations,
                                             AnnotateSummary* summary) {
  std::vector<AnnotatedRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(annotate_record(r, extractors, ablations));
    if (summary) summary->add(out.back());
  }
  return out;
}

namespace {

json tags_json(const TagSet& t) {
  json j = json::object();
  if (t.commentary_type) j["commentary_type"] = std::string(to_string(*t.commentary_type));
  if (t.move_quality) j["move_quality"] = std::string(to_string(*t.move_quality));
  if (t.suggested) {
    json lines = json::array();
    for (const auto& l : *t.suggested) lines.push_back(l.moves);
    j["suggested"] = lines;
  }
  j["pronouns"] = t.pronouns;
  j["proper_nouns"] = t.proper_nouns;
  if (t.length) j["length"] = std::string(to_string(*t.length));
  return j;
}

std::vector<std::string> string_list(const json& j, const char* name, std::size_t line_no) {
  std::vector<std::string> out;
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_array()) throw MalformedRecord(std::string("bad type for \"") + name + "\"", line_no);
  for (const json& s : *it) {
    if (!s.is_string()) throw MalformedRecord(std::string("non-string in \"") + name + "\"", line_no);
    out.push_back(s.get<std::string>());
  }
  return out;
}

template <class T, class Parse>
std::optional<T> enum_field(const json& j, const char* name, Parse parse, std::size_t line_no) {
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw MalformedRecord(std::string("bad type for \"") + name + "\"", line_no);
  auto v = parse(it->get<std::string>());
  if (!v) throw MalformedRecord("unknown " + std::string(name) + " \"" + it->get<std::string>() + "\"", line_no);
  return v;
}

}  // namespace

std::string tagset_to_json(const TagSet& tags) { return tags_json(tags).dump(); }

TagSet tagset_from_json(std::string_view text, std::size_t line_no) {
  const json root = parse_json_line(text, line_no);
  if (!root.is_object()) throw MalformedRecord("tags are not an object", line_no);
  const json& j = root.contains("tags") ? root["tags"] : root;
  if (!j.is_object()) throw MalformedRecord("tags are not an object", line_no);
  TagSet t;
  t.commentary_type = enum_field<CommentaryType>(j, "commentary_type", parse_commentary_type, line_no);
  t.move_quality = enum_field<MoveQuality>(j, "move_quality", parse_move_quality, line_no);
  t.length = enum_field<LengthClass>(j, "length", parse_length_class, line_no);
  if (auto it = j.find("suggested"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw MalformedRecord("bad type for \"suggested\"", line_no);
    t.suggested.emplace();
    for (const json& l : *it) {
      SuggestedLine line;
      if (l.is_string()) {
        line.moves.push_back(l.get<std::string>());
      } else if (l.is_array()) {
        for (const json& m : l) {
          if (!m.is_string()) throw MalformedRecord("non-string suggested move", line_no);
          line.moves.push_back(m.get<std::string>());
        }
      } else {
        throw MalformedRecord("bad suggested line", line_no);
      }
      t.suggested->push_back(std::move(line));
    }
  }
  t.pronouns = string_list(j, "pronouns", line_no);
  t.proper_nouns = string_list(j, "proper_nouns", line_no);
  return t;
}

std::string to_jsonl(const AnnotatedRecord& r) {
  json j;
  const TripletRecord& rec = *r.record;
  j["source"] = rec.source;
  j["game"] = rec.game_id;
  json moves = json::array();
  for (const auto& m : rec.game.plies) moves.push_back(m.san);
  j["moves"] = moves;
  j["move"] = rec.move.san;
  j["commentary"] = rec.commentary.text;
  j["tags"] = tags_json(r.annotation.tags);
  json inputs = json::object();
  for (const auto& [ablation, input] : r.inputs) inputs[std::string(repr::to_string(ablation))] = input.text;
  j["inputs"] = inputs;
  json warnings = json::array();
  for (const auto& w : r.annotation.warnings) warnings.push_back({{"extractor", w.extractor}, {"message", w.message}});
  j["warnings"] = warnings;
  return j.dump();
}

// ---- splits -------------------------------------------------------------

void SplitSpec::validate() const {
  int sum = 0;
  for (int r : ratios) {
    if (r < 0) throw Error("split ratios must be nonnegative");
    sum += r;
  }
  if (sum != 100) throw Error("split ratios must sum to 100, got " + std::to_string(sum));
}

std::array<int, 3> SplitSpec::parse_ratios(std::string_view text) {
  std::array<int, 3> out{};
  std::size_t i = 0;
  std::string part;
  std::istringstream in{std::string(text)};
  while (std::getline(in, part, ':')) {
    if (i == 3 || part.empty() || !std::all_of(part.begin(), part.end(), [](unsigned char c) { return std::isdigit(c); }) ||
        part.size() > 3)
      throw Error("bad split ratios \"" + std::string(text) + "\"");
    out[i++] = std::stoi(part);
  }
  if (i != 3) throw Error("bad split ratios \"" + std::string(text) + "\"");
  return out;
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Valid: return "valid";
    case Split::Test: return "test";
  }
  return "?";
}

std::uint64_t split_key(std::uint64_t seed, std::string_view game_id) {
  // FNV-1a over the id, then a splitmix64 finalizer keyed by the seed.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : game_id) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::uint64_t z = h ^ (seed + 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::vector<Split> assign_splits(const std::vector<std::string>& game_ids, const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = game_ids.size();
  std::map<std::string_view, std::vector<std::size_t>> games;
  for (std::size_t i = 0; i < n; ++i) games[game_ids[i]].push_back(i);

  struct Game {
    std::uint64_t key;
    std::string_view id;
    const std::vector<std::size_t>* members;
  };
  std::vector<Game> order;
  order.reserve(games.size());
  for (const auto& [id, members] : games) order.push_back({split_key(spec.seed, id), id, &members});
  std::sort(order.begin(), order.end(), [](const Game& a, const Game& b) {
    return a.key != b.key ? a.key < b.key : a.id < b.id;
  });

  const std::size_t test_quota = n * static_cast<std::size_t>(spec.ratios[2]) / 100;
  const std::size_t valid_quota = n * static_cast<std::size_t>(spec.ratios[1]) / 100;
  std::size_t test_n = 0, valid_n = 0;
  std::vector<Split> out(n, Split::Train);
  for (const Game& g : order) {
    const std::size_t size = g.members->size();
    Split s = Split::Train;
    if (test_n + size <= test_quota) {
      s = Split::Test;
      test_n += size;
    } else if (valid_n + size <= valid_quota) {
      s = Split::Valid;
      valid_n += size;
    }
    for (std::size_t i : *g.members) out[i] = s;
  }
  return out;
}

SplitResult split_dataset(const std::vector<TripletRecord>& records, const SplitSpec& spec) {
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const auto& r : records) ids.push_back(r.game_id);
  const auto splits = assign_splits(ids, spec);
  SplitResult out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    switch (splits[i]) {
      case Split::Train: out.train.push_back(records[i]); break;
      case Split::Valid: out.valid.push_back(records[i]); break;
      case Split::Test: out.test.push_back(records[i]); break;
    }
  }
  return out;
}

// ---- extractor evaluation ----------------------------------------------

double macro_f1(const std::vector<std::string>& predicted, const std::vector<std::string>& gold) {
  if (predicted.size() != gold.size())
    throw LengthMismatch("predictions: " + std::to_string(predicted.size()) +
                         ", gold: " + std::to_string(gold.size()));
  std::map<std::string, std::array<std::size_t, 3>> counts;  // tp, fp, fn
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const std::string& p = predicted[i];
    const std::string& g = gold[i];
    if (!p.empty() && p == g) {
      ++counts[g][0];
      continue;
    }
    if (!p.empty()) ++counts[p][1];
    if (!g.empty()) ++counts[g][2];
  }
  if (counts.empty()) return 1.0;
  double sum = 0.0;
  for (const auto& [label, c] : counts) {
    const double denom = 2.0 * c[0] + c[1] + c[2];
    sum += denom == 0 ? 0.0 : 2.0 * c[0] / denom;
  }
  return sum / static_cast<double>(counts.size());
}

namespace {

template <class Get>
std::optional<double> classifier_f1(const std::vector<TagSet>& pred, const std::vector<TagSet>& gold, Get get) {
  std::vector<std::string> p, g;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto gv = get(gold[i]);
    if (!gv) continue;
    g.emplace_back(to_string(*gv));
    const auto pv = get(pred[i]);
    p.emplace_back(pv ? std::string(to_string(*pv)) : std::string());
  }
  if (g.empty()) return std::nullopt;
  return macro_f1(p, g);
}

template <class Get>
std::optional<double> exact_match(const std::vector<TagSet>& pred, const std::vector<TagSet>& gold, Get get) {
  std::size_t total = 0, hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const std::vector<std::string> p = get(pred[i]);
    const std::vector<std::string> g = get(gold[i]);
    if (p.empty() && g.empty()) continue;
    ++total;
    if (p == g) ++hits;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<std::string> suggestion_tokens(const TagSet& t) {
  std::vector<std::string> out;
  if (!t.suggested) return out;
  for (std::size_t i = 0; i < t.suggested->size(); ++i) {
    if (i) out.emplace_back("|");
    for (const auto& m : (*t.suggested)[i].moves) out.push_back(m);
  }
  return out;
}

}  // namespace

ExtractorMetrics evaluate_extractor(const std::vector<TagSet>& predictions,
                                    const std::vector<TagSet>& gold) {
  if (predictions.size() != gold.size())
    throw LengthMismatch("predictions: " + std::to_string(predictions.size()) +
                         ", gold: " + std::to_string(gold.size()));
  ExtractorMetrics m;
  m.examples = gold.size();
  m.commentary_type_f1 = classifier_f1(predictions, gold, [](const TagSet& t) { return t.commentary_type; });
  m.move_quality_f1 = classifier_f1(predictions, gold, [](const TagSet& t) { return t.move_quality; });
  m.length_f1 = classifier_f1(predictions, gold, [](const TagSet& t) { return t.length; });
  m.suggested_exact = exact_match(predictions, gold, suggestion_tokens);
  m.pronoun_exact = exact_match(predictions, gold, [](const TagSet& t) { return t.pronouns; });
  m.proper_noun_exact = exact_match(predictions, gold, [](const TagSet& t) { return t.proper_nouns; });
  return m;
}

std::string to_json(const ExtractorMetrics& m) {
  json j;
  j["examples"] = m.examples;
  auto put = [&](const char* name, const std::optional<double>& v) {
    j[name] = v ? json(*v) : json(nullptr);
  };
  put("commentary_type_f1", m.commentary_type_f1);
  put("move_quality_f1", m.move_quality_f1);
  put("length_f1", m.length_f1);
  put("suggested_exact", m.suggested_exact);
  put("pronoun_exact", m.pronoun_exact);
  put("proper_noun_exact", m.proper_noun_exact);
  return j.dump();
}

}  // namespace chesscomm::corpus
