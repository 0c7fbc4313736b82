#include "chesscomm/tags.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>

namespace chesscomm::tags {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_file(char c) { return c >= 'a' && c <= 'h'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

struct Token {
  std::string_view text;
  std::size_t offset;
};

std::vector<Token> split_ws(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) out.push_back({text.substr(start, i - start), start});
  }
  return out;
}

// Strips a trailing "'s" or "’s" (UTF-8 right single quote).
std::string_view strip_possessive(std::string_view w) {
  if (w.size() > 2 && (w.substr(w.size() - 2) == "'s" || w.substr(w.size() - 2) == "'S")) {
    return w.substr(0, w.size() - 2);
  }
  if (w.size() > 4 && w.substr(w.size() - 4) == "\xE2\x80\x99s") return w.substr(0, w.size() - 4);
  return w;
}

bool is_possessive(std::string_view w) { return strip_possessive(w).size() != w.size(); }

std::string normalize_word(std::string_view w) { return lower(strip_possessive(w)); }

// Occurrences of `phrase` in lowercase `text` bounded by non-alphanumerics.
int count_phrase(const std::string& text, std::string_view phrase) {
  int n = 0;
  for (std::size_t at = text.find(phrase); at != std::string::npos;
       at = text.find(phrase, at + 1)) {
    const bool left = at == 0 || !is_alnum(text[at - 1]);
    const std::size_t end = at + phrase.size();
    const bool right = end == text.size() || !is_alnum(text[end]);
    if (left && right) ++n;
  }
  return n;
}

// ---- cue lexicons --------------------------------------------------------

constexpr std::string_view kQualityCues[] = {
    "blunder",   "blunders",   "mistake",    "inaccuracy", "inaccurate", "excellent",
    "brilliant", "dubious",    "strong move", "great move", "good move",  "bad move",
    "weak move", "best move",  "poor move",  "nice move",  "terrible",   "careless"};

constexpr std::string_view kComparisonCues[] = {
    "better was",  "better is",     "was better",     "would have been", "preferred",
    "instead of",  "instead",       "rather than",    "should have",     "stronger was",
    "better would", "alternative",  "could have played", "more accurate was"};

constexpr std::string_view kDescriptionCues[] = {
    "castles",  "castling", "captures", "takes",   "recaptures", "develops", "pushes",
    "moves",    "advances", "retreats", "exchanges", "trades",   "promotes", "checks"};

constexpr std::string_view kPlanningCues[] = {
    "plan",      "planning",   "trying to", "tries to",  "in order to", "prevent",
    "prevents",  "prepare",    "prepares",  "preparing", "idea",        "aims",
    "aiming",    "intending",  "so that",   "threatening", "threatens", "wants to",
    "looking to", "hoping",    "force",     "to gain",   "to control",  "to open"};

constexpr std::string_view kContextualCues[] = {
    "advantage", "winning",   "losing",     "position",  "equal",     "equality",
    "initiative", "material", "draw",       "drawn",     "clear",     "compensation",
    "pressure",  "endgame",   "middlegame", "up a",      "down a"};

constexpr std::string_view kGeneralCues[] = {
    "game between", "tournament", "championship", "match", "player", "players",
    "round",        "event",      "rated",        "blitz", "thanks", "vs"};

constexpr std::string_view kPieceWords[] = {"king", "queen", "rook", "bishop", "knight", "pawn"};

template <std::size_t N>
int score_cues(const std::string& text, const std::string_view (&cues)[N]) {
  int n = 0;
  for (auto cue : cues) n += count_phrase(text, cue);
  return n;
}

bool is_square_word(std::string_view w) {
  return w.size() == 2 && is_file(w[0]) && w[1] >= '1' && w[1] <= '8';
}

// Words after which a bare square names a location, not a pawn move.
constexpr std::string_view kSquarePrepositions[] = {
    "to", "on", "at", "from", "towards", "toward", "into", "onto", "via", "of", "the", "over"};

bool is_square_preposition(std::string_view w) {
  const std::string l = lower(w);
  return std::find(std::begin(kSquarePrepositions), std::end(kSquarePrepositions), l) !=
         std::end(kSquarePrepositions);
}

constexpr std::string_view kPronouns[] = {
    "i",    "me",     "my",     "mine",  "myself",   "you",  "your",  "yours",
    "yourself", "he", "him",    "his",   "himself",  "she",  "her",   "hers",
    "herself", "we",  "us",     "our",   "ours",     "ourselves", "they", "them",
    "their", "theirs", "themselves"};

// Capitalized words that are never names.
const std::set<std::string>& non_names() {
  static const std::set<std::string> words = {
      // chess vocabulary
      "white", "black", "king", "queen", "rook", "bishop", "knight", "pawn", "kings", "queens",
      "rooks", "bishops", "knights", "pawns", "check", "checkmate", "mate", "castle", "castles",
      "castling", "opening", "defense", "defence", "gambit", "attack", "variation", "system",
      "game", "move", "moves", "endgame", "middlegame", "kingside", "queenside", "gm", "im", "fm",
      "wgm", "cm", "nm", "elo", "fide", "san", "pgn", "fen", "uci", "ok",
      // function words and common sentence openers
      "the", "a", "an", "this", "that", "these", "those", "then", "now", "here", "there",
      "after", "before", "but", "and", "or", "so", "if", "when", "while", "with", "in", "on",
      "at", "for", "of", "to", "from", "by", "as", "it", "its", "what", "why", "how", "not",
      "no", "yes", "again", "also", "still", "maybe", "perhaps", "instead", "better", "best",
      "good", "great", "nice", "well", "finally", "obviously", "clearly", "unfortunately",
      "interesting", "interestingly", "however", "although", "because", "since", "only",
      "just", "even", "all", "both", "each", "every", "some", "any", "one", "two", "next",
      "first", "last", "another", "other", "why", "which", "who", "whose"};
  return words;
}

// ---- SAN shape -----------------------------------------------------------

std::string_view strip_suffixes(std::string_view t) {
  while (!t.empty() && (t.back() == '!' || t.back() == '?' || t.back() == '+' || t.back() == '#')) {
    t.remove_suffix(1);
  }
  return t;
}

bool loose_square_tail(std::string_view t) {
  // [a-z][0-9]{1,2}
  if (t.size() < 2 || t.size() > 3) return false;
  if (!(t[0] >= 'a' && t[0] <= 'z')) return false;
  return std::all_of(t.begin() + 1, t.end(), is_digit);
}

struct Cleaned {
  std::string_view core;  // SAN candidate with glyphs kept
  bool closes_run = false;
  bool number_only = false;
};

Cleaned clean_token(std::string_view tok) {
  Cleaned out;
  while (!tok.empty() && (tok.front() == '(' || tok.front() == '[' || tok.front() == '"' ||
                          tok.front() == '\'')) {
    tok.remove_prefix(1);
  }
  while (!tok.empty()) {
    const char c = tok.back();
    if (c == ',' || c == ';' || c == ':' || c == ')' || c == ']' || c == '"' || c == '\'') {
      if (c != '"' && c != '\'' && c != ']') out.closes_run = true;
      tok.remove_suffix(1);
    } else if (c == '.' && !std::all_of(tok.begin(), tok.end(),
                                         [](char x) { return is_digit(x) || x == '.'; })) {
      out.closes_run = true;
      tok.remove_suffix(1);
    } else {
      break;
    }
  }
  // Move numbers: "21." "21..." alone, or glued to the move as in "21...Qxd4".
  std::size_t digits = 0;
  while (digits < tok.size() && is_digit(tok[digits])) ++digits;
  std::size_t dots = digits;
  while (dots < tok.size() && tok[dots] == '.') ++dots;
  if (digits > 0 && dots > digits) {
    if (dots == tok.size()) {
      out.number_only = true;
      out.core = {};
      return out;
    }
    tok.remove_prefix(dots);
  }
  out.core = tok;
  return out;
}

}  // namespace

std::size_t count_tokens(std::string_view text) { return split_ws(text).size(); }

std::size_t Commentary::token_count() const { return count_tokens(text); }

LengthClass length_class(std::size_t token_count, const LengthCutoffs& cutoffs) {
  if (token_count <= cutoffs.short_max) return LengthClass::Short;
  if (token_count <= cutoffs.medium_max) return LengthClass::Medium;
  return LengthClass::Long;
}

LengthClass tag_length(const Commentary& c, const LengthCutoffs& cutoffs) {
  return length_class(c.token_count(), cutoffs);
}

std::optional<std::pair<MoveQuality, std::size_t>> leading_marker(std::string_view text) {
  text = trim(text);
  // Longest first; "?!" is the conventional dubious-move glyph and is
  // grouped with "!?".
  static constexpr std::pair<std::string_view, MoveQuality> kMarkers[] = {
      {"!!", MoveQuality::Excellent}, {"??", MoveQuality::Blunder},
      {"!?", MoveQuality::Inaccuracy}, {"?!", MoveQuality::Inaccuracy},
      {"!", MoveQuality::Good},        {"?", MoveQuality::Mistake}};
  for (const auto& [marker, quality] : kMarkers) {
    if (text.substr(0, marker.size()) == marker) return std::pair{quality, marker.size()};
  }
  return std::nullopt;
}

std::optional<MoveQuality> extract_move_quality_text(const Commentary& c) {
  if (auto m = leading_marker(c.text)) return m->first;

  // Earliest lexicon cue wins.
  static constexpr std::pair<std::string_view, MoveQuality> kLexicon[] = {
      {"blunder", MoveQuality::Blunder},       {"blunders", MoveQuality::Blunder},
      {"mistake", MoveQuality::Mistake},       {"inaccuracy", MoveQuality::Inaccuracy},
      {"inaccurate", MoveQuality::Inaccuracy}, {"excellent", MoveQuality::Excellent},
      {"brilliant", MoveQuality::Excellent},   {"strong move", MoveQuality::Good},
      {"great move", MoveQuality::Good},       {"good move", MoveQuality::Good}};
  const std::string text = lower(trim(c.text));
  std::optional<MoveQuality> best;
  std::size_t best_at = std::string::npos;
  for (const auto& [cue, quality] : kLexicon) {
    for (std::size_t at = text.find(cue); at != std::string::npos; at = text.find(cue, at + 1)) {
      const bool left = at == 0 || !is_alnum(text[at - 1]);
      const std::size_t end = at + cue.size();
      const bool right = end == text.size() || !is_alnum(text[end]);
      if (left && right) {
        if (at < best_at) {
          best_at = at;
          best = quality;
        }
        break;
      }
    }
  }
  return best;
}

TypeScore rule_commentary_type(std::string_view raw) {
  const std::string text = lower(raw);
  std::array<int, 6> score{};  // indexed by CommentaryType
  auto idx = [](CommentaryType t) { return static_cast<std::size_t>(t); };

  score[idx(CommentaryType::MoveQuality)] = score_cues(text, kQualityCues);
  if (leading_marker(raw)) score[idx(CommentaryType::MoveQuality)] += 2;
  score[idx(CommentaryType::MoveComparison)] = score_cues(text, kComparisonCues);
  score[idx(CommentaryType::PlanningRationale)] = score_cues(text, kPlanningCues);
  score[idx(CommentaryType::Contextual)] = score_cues(text, kContextualCues);
  score[idx(CommentaryType::General)] = score_cues(text, kGeneralCues);

  int description = score_cues(text, kDescriptionCues);
  if (!find_san_runs(raw).empty()) ++description;
  const auto words = split_ws(text);
  bool saw_square = false;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto w = clean_token(words[i].text).core;
    if (is_square_word(w)) saw_square = true;
    if (i + 1 < words.size() && words[i + 1].text == "to" &&
        std::find(std::begin(kPieceWords), std::end(kPieceWords), w) != std::end(kPieceWords)) {
      ++description;
    }
  }
  if (saw_square) ++description;
  score[idx(CommentaryType::MoveDescription)] = description;

  static constexpr CommentaryType kPriority[] = {
      CommentaryType::MoveQuality,       CommentaryType::MoveComparison,
      CommentaryType::MoveDescription,   CommentaryType::PlanningRationale,
      CommentaryType::Contextual,        CommentaryType::General};
  TypeScore out;
  int best = 0;
  int total = 0;
  for (int s : score) total += s;
  for (CommentaryType t : kPriority) {
    if (score[idx(t)] > best) {
      best = score[idx(t)];
      out.type = t;
    }
  }
  out.confidence = total == 0 ? 1.0 / 6.0 : static_cast<double>(best) / total;
  return out;
}

TypeScore extract_commentary_type(const Commentary& c, const TextClassifier* classifier,
                                  std::vector<Warning>* warnings) {
  if (classifier) {
    try {
      const auto label = classifier->classify("commentary_type", c.text);
      if (auto t = parse_commentary_type(label.label)) {
        return {*t, std::clamp(label.confidence, 0.0, 1.0)};
      }
      if (!label.label.empty() && warnings) {
        warnings->push_back({"commentary_type", "classifier label '" + label.label +
                                                    "' is not a commentary type"});
      }
    } catch (const Error& e) {
      if (warnings) warnings->push_back({"commentary_type", std::string("classifier: ") + e.what()});
    }
  }
  return rule_commentary_type(c.text);
}

bool san_shaped(std::string_view token) {
  const std::string_view t = strip_suffixes(token);
  if (t.empty()) return false;
  if (t == "O-O" || t == "O-O-O" || t == "0-0" || t == "0-0-0") return true;
  if (t[0] == 'K' || t[0] == 'Q' || t[0] == 'R' || t[0] == 'B' || t[0] == 'N') {
    std::string_view rest = t.substr(1);
    // Optional disambiguation and capture in front of the target square.
    if (rest.size() > 2 && is_file(rest[0]) && !is_digit(rest[1])) rest.remove_prefix(1);
    else if (rest.size() > 2 && is_digit(rest[0])) rest.remove_prefix(1);
    else if (rest.size() > 3 && is_file(rest[0]) && is_digit(rest[1])) rest.remove_prefix(2);
    if (!rest.empty() && rest[0] == 'x') rest.remove_prefix(1);
    return loose_square_tail(rest);
  }
  if (!is_file(t[0])) return false;
  std::string_view rest = t.substr(1);
  if (rest.size() >= 2 && rest[0] == 'x' && is_file(rest[1])) rest.remove_prefix(2);
  std::size_t digits = 0;
  while (digits < rest.size() && is_digit(rest[digits])) ++digits;
  if (digits == 0 || digits > 2) return false;
  rest.remove_prefix(digits);
  if (!rest.empty() && rest[0] == '=') rest.remove_prefix(1);
  if (rest.empty()) return true;
  return rest.size() == 1 && (rest[0] == 'Q' || rest[0] == 'R' || rest[0] == 'B' || rest[0] == 'N');
}

std::vector<SanRun> find_san_runs(std::string_view text) {
  std::vector<SanRun> runs;
  std::optional<SanRun> current;
  auto close = [&] {
    if (current && !current->tokens.empty()) runs.push_back(std::move(*current));
    current.reset();
  };
  const auto words = split_ws(text);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const Cleaned c = clean_token(words[i].text);
    if (c.number_only) {
      if (c.closes_run) close();
      continue;
    }
    bool shaped = san_shaped(c.core);
    if (shaped && is_square_word(c.core) && i > 0 &&
        is_square_preposition(clean_token(words[i - 1].text).core)) {
      shaped = false;
    }
    if (!shaped) {
      close();
      continue;
    }
    const std::size_t end = words[i].offset + words[i].text.size();
    if (!current) current = SanRun{{}, words[i].offset, 0};
    current->tokens.emplace_back(strip_suffixes(c.core));
    current->length = end - current->offset;
    if (c.closes_run) close();
  }
  close();
  return runs;
}

std::optional<std::vector<SuggestedLine>> extract_suggested_moves(
    const Commentary& c, const chess::BoardState& anchor, std::vector<Warning>* warnings) {
  std::vector<SuggestedLine> lines;
  for (const SanRun& run : find_san_runs(c.text)) {
    SuggestedLine line;
    line.anchor = anchor;
    chess::BoardState board = anchor;
    bool ok = true;
    for (const auto& san : run.tokens) {
      try {
        const chess::MoveRecord m = chess::parse_san(board, san);
        line.moves.push_back(m.san);
        board = chess::apply_move(board, m);
      } catch (const chess::ChessError& e) {
        if (warnings) {
          warnings->push_back(
              {"suggested_moves", "dropped run at offset " + std::to_string(run.offset) + " ('" +
                                      san + "'): " + e.what()});
        }
        ok = false;
        break;
      }
    }
    if (ok) lines.push_back(std::move(line));
  }
  if (lines.empty()) return std::nullopt;
  return lines;
}

// ---- allow list ----------------------------------------------------------

namespace {

// Word with surrounding punctuation removed; apostrophes and hyphens
// inside the word are kept.
std::string_view strip_punct(std::string_view w) {
  while (!w.empty() && !is_alnum(w.front()) && static_cast<unsigned char>(w.front()) < 0x80) {
    w.remove_prefix(1);
  }
  while (!w.empty() && !is_alnum(w.back()) && static_cast<unsigned char>(w.back()) < 0x80) {
    w.remove_suffix(1);
  }
  return w;
}

std::vector<std::string> phrase_words(std::string_view phrase) {
  std::vector<std::string> out;
  for (const auto& t : split_ws(phrase)) {
    const auto w = strip_punct(t.text);
    if (!w.empty()) out.push_back(normalize_word(w));
  }
  return out;
}

}  // namespace

AllowList::AllowList(const std::vector<std::string>& phrases) {
  for (const auto& p : phrases) {
    auto words = phrase_words(p);
    if (!words.empty()) phrases_.push_back(std::move(words));
  }
}

const std::vector<std::string>& AllowList::builtin_phrases() {
  static const std::vector<std::string> phrases = {
      "Ruy Lopez", "Spanish Game", "Berlin Defense", "Marshall Attack", "Breyer Variation",
      "Zaitsev Variation", "Schliemann", "Jaenisch Gambit", "Morphy Defense", "Steinitz Defense",
      "Cozio Defense", "Italian Game", "Giuoco Piano", "Evans Gambit", "Two Knights Defense",
      "Fried Liver", "Max Lange Attack", "Scotch Game", "Scotch Gambit", "Vienna Game",
      "King's Gambit", "Bishop's Opening", "Four Knights", "Ponziani", "Danish Gambit",
      "Goring Gambit", "Latvian Gambit", "Elephant Gambit", "Philidor Defense", "Petrov Defense",
      "Petroff Defense", "Russian Game", "Sicilian", "Sicilian Defense", "Najdorf", "Dragon",
      "Accelerated Dragon", "Yugoslav Attack", "Scheveningen", "Sveshnikov", "Taimanov",
      "Kan Variation", "Alapin", "Smith-Morra", "Morra Gambit", "Wing Gambit", "Richter-Rauzer",
      "Maroczy Bind", "Hedgehog", "French", "French Defense", "Winawer", "Tarrasch Variation",
      "Advance Variation", "Exchange Variation", "Caro-Kann", "Panov Attack", "Pirc Defense",
      "Modern Defense", "Alekhine's Defense", "Scandinavian", "Scandinavian Defense",
      "Owen's Defense", "Hippopotamus", "Nimzowitsch Defense", "St. George", "Queen's Gambit",
      "Queen's Gambit Declined", "Queen's Gambit Accepted", "Orthodox Defense", "Tartakower",
      "Cambridge Springs", "Ragozin", "Tarrasch Defense", "Slav", "Slav Defense", "Semi-Slav",
      "Meran", "Botvinnik Variation", "Catalan", "Albin Countergambit", "Chigorin Defense",
      "Nimzo-Indian", "Queen's Indian", "Bogo-Indian", "King's Indian", "King's Indian Defense",
      "King's Indian Attack", "Grunfeld", "Grünfeld", "Benoni", "Modern Benoni", "Benko Gambit",
      "Budapest Gambit", "Dutch", "Dutch Defense", "Stonewall", "Leningrad Dutch",
      "London System", "Colle System", "Torre Attack", "Trompowsky", "Veresov",
      "Blackmar-Diemer", "English", "English Opening", "Reti", "Réti", "Reti Opening",
      "Bird's Opening", "Larsen's Opening", "Nimzo-Larsen", "Polish Opening", "Sokolsky",
      "Grob", "Fianchetto", "Lasker Defense", "Halloween Gambit", "Englund Gambit",
      "Stafford Gambit", "Traxler", "Lolli Attack"};
  return phrases;
}

const AllowList& AllowList::builtin() {
  static const AllowList list(builtin_phrases());
  return list;
}

AllowList AllowList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read allow list " + path.string());
  std::vector<std::string> phrases;
  for (std::string line; std::getline(in, line);) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    phrases.emplace_back(t);
  }
  return AllowList(phrases);
}

std::size_t AllowList::match(const std::vector<std::string>& words, std::size_t i) const {
  std::size_t best = 0;
  for (const auto& phrase : phrases_) {
    if (phrase.size() <= best || i + phrase.size() > words.size()) continue;
    bool eq = true;
    for (std::size_t k = 0; k < phrase.size() && eq; ++k) {
      eq = normalize_word(words[i + k]) == phrase[k];
    }
    if (eq) best = phrase.size();
  }
  return best;
}

// ---- entities ------------------------------------------------------------

bool is_pronoun(std::string_view word) {
  const std::string l = lower(word);
  return std::find(std::begin(kPronouns), std::end(kPronouns), l) != std::end(kPronouns);
}

Entities extract_entities(const Commentary& c, const AllowList& allow,
                          const EntityRecognizer* recognizer) {
  if (recognizer) return recognizer->recognize(c.text);

  struct Word {
    std::string text;
    bool sentence_start;
  };
  std::vector<Word> words;
  bool boundary = true;
  for (const auto& tok : split_ws(c.text)) {
    const std::string_view w = strip_punct(tok.text);
    if (!w.empty()) words.push_back({std::string(w), boundary});
    std::string_view t = tok.text;
    while (!t.empty() && (t.back() == '"' || t.back() == '\'' || t.back() == ')')) t.remove_suffix(1);
    const bool ends = !t.empty() && (t.back() == '.' || t.back() == '!' || t.back() == '?' ||
                                     t.back() == ':');
    // A bare marker such as "??" keeps the sentence open for the next word.
    boundary = w.empty() ? boundary || ends : ends;
  }

  std::vector<std::string> plain;
  plain.reserve(words.size());
  for (const auto& w : words) plain.push_back(w.text);

  // Candidates: capitalized, not a pronoun, not a move, not vocabulary, not
  // allow-listed.
  std::vector<bool> candidate(words.size(), false);
  for (std::size_t i = 0; i < words.size();) {
    if (const std::size_t n = allow.match(plain, i)) {
      i += n;
      continue;
    }
    const std::string& w = words[i].text;
    const std::string base = normalize_word(w);
    candidate[i] = is_upper(w[0]) && base.size() >= 2 && !is_pronoun(w) && !san_shaped(w) &&
                   !non_names().count(base);
    ++i;
  }

  Entities out;
  auto add = [](std::vector<std::string>& list, const std::string& w) {
    if (std::find(list.begin(), list.end(), w) == list.end()) list.push_back(w);
  };
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string& w = words[i].text;
    if (is_pronoun(w)) {
      add(out.pronouns, w);
      continue;
    }
    if (!candidate[i]) continue;
    if (words[i].sentence_start && !is_possessive(w) &&
        !(i + 1 < words.size() && candidate[i + 1])) {
      continue;
    }
    add(out.proper_nouns, w);
  }
  return out;
}

// ---- annotate ------------------------------------------------------------

Annotation annotate(const Commentary& c, const chess::BoardState& anchor,
                    const ExtractorSet& extractors) {
  Annotation out;
  const AllowList& allow = extractors.allow_list ? *extractors.allow_list : AllowList::builtin();
  out.tags.length = tag_length(c, extractors.cutoffs);
  if (c.token_count() == 0) return out;

  const TypeScore type = extract_commentary_type(c, extractors.classifier, &out.warnings);
  out.tags.commentary_type = type.type;
  out.type_confidence = type.confidence;
  out.tags.move_quality = extract_move_quality_text(c);
  out.tags.suggested = extract_suggested_moves(c, anchor, &out.warnings);
  Entities e = extract_entities(c, allow, extractors.recognizer);
  out.tags.pronouns = std::move(e.pronouns);
  out.tags.proper_nouns = std::move(e.proper_nouns);
  return out;
}

}  // namespace chesscomm::tags
