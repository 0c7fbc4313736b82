// chesscomm: dataset preparation, inference and probing from the command line.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "chesscomm/backend.hpp"
#include "chesscomm/corpus.hpp"
#include "chesscomm/engine.hpp"
#include "chesscomm/inference.hpp"
#include "chesscomm/probe.hpp"
#include "chesscomm/representation.hpp"
#include "chesscomm/tags.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace chesscomm;
using json = nlohmann::ordered_json;

namespace {

// Output file, or stdout for "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error("cannot open " + path + " for writing");
    }
  }
  std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file.open(path);
    if (!file) throw Error("cannot open " + path);
    in = &file;
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(*in, line)) lines.push_back(line);
  return lines;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

backend::HttpOptions http_options(int timeout_ms, int retries) {
  backend::HttpOptions o;
  o.read_timeout = std::chrono::milliseconds(timeout_ms);
  o.retries = retries;
  return o;
}

struct UniformOracle : backend::ScoreOracle {
  std::vector<double> score(std::string_view, const std::vector<std::string>& c) override {
    return std::vector<double>(c.size(), 0.0);
  }
};

// ---- annotate -----------------------------------------------------------

struct AnnotateArgs {
  std::string in, out = "-";
  std::vector<std::string> ablations{"fully"};
  bool strict = false;
  std::string classifier;
};

int run_annotate(const AnnotateArgs& a) {
  std::vector<repr::RepresentationConfig> configs;
  for (const auto& name : a.ablations) {
    if (name == "all") {
      for (auto c : {repr::RepresentationConfig::unconditioned(), repr::RepresentationConfig::move_only(),
                     repr::RepresentationConfig::game_state(), repr::RepresentationConfig::with_tags(),
                     repr::RepresentationConfig::fully()})
        configs.push_back(c);
      continue;
    }
    const auto ab = repr::parse_ablation(name);
    if (!ab) throw Error("unknown ablation \"" + name + "\"");
    repr::RepresentationConfig c;
    c.ablation = *ab;
    configs.push_back(c);
  }

  std::unique_ptr<backend::HttpClassifier> classifier;
  tags::ExtractorSet extractors;
  if (!a.classifier.empty()) {
    classifier = std::make_unique<backend::HttpClassifier>(backend::Endpoint::parse(a.classifier));
    extractors.classifier = classifier.get();
  }

  corpus::TripletReader reader(a.in, a.strict);
  Sink sink(a.out);
  corpus::AnnotateSummary summary;
  while (auto rec = reader.next()) {
    const auto r = corpus::annotate_record(*rec, extractors, configs);
    summary.add(r);
    sink.out() << corpus::to_jsonl(r) << '\n';
  }
  for (const auto& issue : reader.issues())
    std::cerr << a.in << ": " << issue.message << " (skipped)\n";
  json s;
  s["records"] = summary.records;
  s["skipped"] = reader.issues().size();
  s["with_warnings"] = summary.with_warnings;
  s["warnings_by_extractor"] = summary.warnings_by_extractor;
  std::cerr << s.dump() << '\n';
  return 0;
}

// ---- split --------------------------------------------------------------

struct SplitArgs {
  std::string in = "-", out_dir = ".", ratios = "85:10:5";
  std::uint64_t seed = 0;
  bool strict = false;
};

int run_split(const SplitArgs& a) {
  corpus::SplitSpec spec;
  spec.ratios = corpus::SplitSpec::parse_ratios(a.ratios);
  spec.seed = a.seed;
  spec.validate();

  std::vector<corpus::TripletRecord> records;
  std::size_t line_no = 0, skipped = 0;
  for (const auto& line : read_lines(a.in)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      records.push_back(corpus::parse_triplet(line, line_no));
    } catch (const corpus::RecordError& e) {
      if (a.strict) throw;
      std::cerr << a.in << ": " << e.what() << " (skipped)\n";
      ++skipped;
    }
  }
  const auto result = corpus::split_dataset(records, spec);
  fs::create_directories(a.out_dir);
  json counts;
  auto write = [&](const char* name, const std::vector<corpus::TripletRecord>& part) {
    Sink sink((fs::path(a.out_dir) / (std::string(name) + ".jsonl")).string());
    for (const auto& r : part) sink.out() << corpus::to_jsonl(r) << '\n';
    counts[name] = part.size();
  };
  write("train", result.train);
  write("valid", result.valid);
  write("test", result.test);
  counts["skipped"] = skipped;
  counts["seed"] = a.seed;
  std::cout << counts.dump() << '\n';
  return 0;
}

// ---- filter-forum -------------------------------------------------------

struct FilterArgs {
  std::string in = "-", out = "-";
  std::vector<std::string> irrelevant_tags, internal_hosts;
  bool no_scrub = false;
};

int run_filter(const FilterArgs& a) {
  corpus::FilterConfig config{a.irrelevant_tags, a.internal_hosts};
  Sink sink(a.out);
  std::map<std::string, std::size_t> dropped;
  std::size_t kept = 0, line_no = 0, malformed = 0;
  auto scrub = [&](const std::string& s) { return a.no_scrub ? s : corpus::scrub_pii(s); };
  for (const auto& line : read_lines(a.in)) {
    ++line_no;
    if (blank(line)) continue;
    corpus::ForumPost post;
    try {
      post = corpus::parse_forum_post(line, line_no);
    } catch (const corpus::RecordError& e) {
      std::cerr << a.in << ": " << e.what() << " (skipped)\n";
      ++malformed;
      continue;
    }
    const auto d = corpus::filter_forum_post(post, config);
    if (!d.keep) {
      ++dropped[d.drop_reason];
      continue;
    }
    ++kept;
    json j;
    json thread = json::array();
    for (const auto& t : post.thread) thread.push_back(scrub(t));
    j["thread"] = thread;
    j["response"] = scrub(post.response);
    if (post.votes) j["votes"] = *post.votes;
    if (!post.tags.empty()) j["tags"] = post.tags;
    json patterns = json::array();
    for (auto p : d.patterns) patterns.push_back(static_cast<int>(p));
    j["patterns"] = patterns;
    j["matches"] = d.matches;
    sink.out() << j.dump() << '\n';
  }
  json s;
  s["kept"] = kept;
  s["dropped"] = dropped;
  s["malformed"] = malformed;
  std::cerr << s.dump() << '\n';
  return 0;
}

// ---- eval-extractor -----------------------------------------------------

int run_eval(const std::string& pred, const std::string& gold) {
  auto load = [](const std::string& path) {
    std::vector<TagSet> out;
    std::size_t line_no = 0;
    for (const auto& line : read_lines(path)) {
      ++line_no;
      if (!blank(line)) out.push_back(corpus::tagset_from_json(line, line_no));
    }
    return out;
  };
  std::cout << corpus::to_json(corpus::evaluate_extractor(load(pred), load(gold))) << '\n';
  return 0;
}

// ---- infer --------------------------------------------------------------

struct InferArgs {
  std::string fen, move, type = "move_quality", length, backend = "template";
  std::string engine, transcript;
  std::vector<std::string> engine_args;
  std::uint64_t nodes = 0, depth = 0;
  int multipv = 1, max_tokens = 64, attempts = 1, timeout_ms = 30000, retries = 0;
};

int run_infer(const InferArgs& a) {
  const auto type = parse_commentary_type(a.type);
  if (!type) throw Error("unknown commentary type \"" + a.type + "\"");
  std::optional<LengthClass> length;
  if (!a.length.empty()) {
    length = parse_length_class(a.length);
    if (!length) throw Error("unknown length class \"" + a.length + "\"");
  }
  const auto request = inference::InferenceRequest::from_fen(a.fen, a.move, *type, length);

  engine::EngineConfig config;
  config.multipv = a.multipv;
  if (a.depth) config.budget = engine::SearchBudget::depth(a.depth);
  else if (a.nodes) config.budget = engine::SearchBudget::nodes(a.nodes);
  if (!a.transcript.empty()) {
    config.transcript = a.transcript;
  } else {
    config.executable = a.engine;
    config.args = a.engine_args;
  }
  auto session = engine::EngineSession::open(config);

  std::unique_ptr<backend::HttpGenerationBackend> gen;
  inference::InferOptions options;
  options.max_tokens = a.max_tokens;
  options.max_attempts = a.attempts;
  if (a.backend != "template") {
    gen = std::make_unique<backend::HttpGenerationBackend>(backend::Endpoint::parse(a.backend),
                                                           http_options(a.timeout_ms, a.retries));
    options.backend = gen.get();
  }
  const auto result = inference::infer(session, request, options);
  session.quit();
  std::cout << inference::to_json(result) << '\n';
  return result.report.ok() ? 0 : 3;
}

// ---- probe --------------------------------------------------------------

struct ProbeArgs {
  std::string fen, backend, out;
  std::vector<std::string> moves;
  std::vector<std::string> segments{"pgn", "pieces", "attacks"};
  int timeout_ms = 30000, retries = 0;
};

int run_probe(const ProbeArgs& a) {
  chess::GameRecord game;
  try {
    game.start = chess::BoardState::from_fen(a.fen);
  } catch (const chess::ChessError& e) {
    throw Error(std::string("bad --fen: ") + e.what());
  }
  chess::BoardState board = game.start;
  for (const auto& san : a.moves) {
    const auto m = chess::parse_san(board, san);
    game.push(m);
    board = chess::apply_move(board, m);
  }
  repr::SegmentToggles toggles{false, false, false};
  for (const auto& s : a.segments) {
    if (s == "pgn") toggles.pgn = true;
    else if (s == "pieces") toggles.pieces = true;
    else if (s == "attacks") toggles.attacks = true;
    else throw Error("unknown segment \"" + s + "\" (pgn, pieces, attacks)");
  }
  const std::string context = probe::probe_context(game, board, toggles);

  std::unique_ptr<backend::ScoreOracle> oracle;
  if (a.backend == "uniform") oracle = std::make_unique<UniformOracle>();
  else
    oracle = std::make_unique<backend::HttpScoreOracle>(backend::Endpoint::parse(a.backend),
                                                        http_options(a.timeout_ms, a.retries));

  fs::create_directories(a.out);
  std::vector<probe::BeliefState> states;
  json prompts = json::array();
  for (const auto& prompt : probe::build_prompts(board)) {
    const auto s = probe::belief_state(*oracle, prompt, board, context);
    const std::string slug = probe::prompt_slug(prompt);
    probe::emit_heatmap(s, fs::path(a.out) / (slug + ".csv"));
    json p;
    p["name"] = slug;
    p["prompt"] = prompt.text;
    p["argmax"] = s.argmax().name();
    p["argmax_valid"] = s.argmax_valid();
    p["weight_on_valid"] = s.weight_on_valid();
    prompts.push_back(p);
    states.push_back(s);
  }
  const auto m = probe::probe_metrics(states);
  json summary;
  summary["fen"] = board.fen();
  summary["context"] = context;
  summary["prompts"] = prompts;
  summary["weight_on_valid"] = m.weight_on_valid;
  summary["argmax_accuracy"] = m.argmax_accuracy;
  Sink((fs::path(a.out) / "summary.json").string()).out() << summary.dump(2) << '\n';
  json brief;
  brief["prompts"] = m.prompts;
  brief["weight_on_valid"] = m.weight_on_valid;
  brief["argmax_accuracy"] = m.argmax_accuracy;
  std::cout << brief.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chess commentary data pipeline and tag-conditioned inference"};
  app.require_subcommand(1);
  int status = 0;

  AnnotateArgs ann;
  auto* annotate = app.add_subcommand("annotate", "Tag (game, move, commentary) triplets and render model inputs");
  annotate->add_option("--in", ann.in, "Triplet JSONL")->required();
  annotate->add_option("--out", ann.out, "Output JSONL, - for stdout");
  annotate->add_option("--ablation", ann.ablations,
                       "unconditioned, move, game-state, tags, fully or all (repeatable)")
      ->delimiter(',');
  annotate->add_flag("--strict", ann.strict, "Stop at the first bad record");
  annotate->add_option("--classifier", ann.classifier, "Classifier endpoint URL for commentary types");
  annotate->callback([&] { status = run_annotate(ann); });

  SplitArgs sp;
  auto* split = app.add_subcommand("split", "Game-grouped train/valid/test split");
  split->add_option("--in", sp.in, "Triplet JSONL, - for stdin");
  split->add_option("--out-dir", sp.out_dir, "Directory for train/valid/test.jsonl");
  split->add_option("--ratios", sp.ratios, "train:valid:test percentages");
  split->add_option("--seed", sp.seed, "Split seed");
  split->add_flag("--strict", sp.strict, "Stop at the first bad record");
  split->callback([&] { status = run_split(sp); });

  FilterArgs fa;
  auto* filter = app.add_subcommand("filter-forum", "Keep chess-grounded forum answers, scrubbed of PII");
  filter->add_option("--in", fa.in, "Forum post JSONL, - for stdin");
  filter->add_option("--out", fa.out, "Output JSONL, - for stdout");
  filter->add_option("--irrelevant-tag", fa.irrelevant_tags, "Drop posts with this site tag (repeatable)");
  filter->add_option("--internal-host", fa.internal_hosts, "Links to this host are not external (repeatable)");
  filter->add_flag("--no-scrub", fa.no_scrub, "Keep emails, URLs and user names");
  filter->callback([&] { status = run_filter(fa); });

  std::string pred, gold;
  auto* eval = app.add_subcommand("eval-extractor", "Score predicted tags against gold tags");
  eval->add_option("--pred", pred, "Predicted tags JSONL")->required();
  eval->add_option("--gold", gold, "Gold tags JSONL")->required();
  eval->callback([&] { status = run_eval(pred, gold); });

  InferArgs ia;
  auto* inf = app.add_subcommand("infer", "Derive tags with an engine and generate commentary");
  inf->add_option("--fen", ia.fen, "Position before the move")->required();
  inf->add_option("--move", ia.move, "Move in SAN")->required();
  inf->add_option("--type", ia.type, "Commentary type, e.g. move_quality");
  inf->add_option("--length", ia.length, "short, medium or long (default medium)");
  inf->add_option("--backend", ia.backend, "template, or a generation endpoint URL");
  auto* engine_opt = inf->add_option("--engine", ia.engine, "UCI engine executable");
  inf->add_option("--engine-arg", ia.engine_args, "Argument for the engine (repeatable)")->needs(engine_opt);
  auto* transcript_opt = inf->add_option("--transcript", ia.transcript, "Replay a recorded UCI transcript");
  engine_opt->excludes(transcript_opt);
  auto* nodes_opt = inf->add_option("--nodes", ia.nodes, "Search budget in nodes");
  inf->add_option("--depth", ia.depth, "Search budget in plies")->excludes(nodes_opt);
  inf->add_option("--multipv", ia.multipv, "Principal variations to request");
  inf->add_option("--max-tokens", ia.max_tokens, "Generation budget");
  inf->add_option("--attempts", ia.attempts, "Generation attempts while grounding fails");
  inf->add_option("--timeout-ms", ia.timeout_ms, "Backend read timeout");
  inf->add_option("--retries", ia.retries, "Retries on an unreachable backend");
  inf->callback([&] {
    if (ia.engine.empty() && ia.transcript.empty()) throw CLI::ValidationError("infer", "--engine or --transcript is required");
    status = run_infer(ia);
  });

  ProbeArgs pa;
  auto* pr = app.add_subcommand("probe", "Prompted belief states over the 64 squares");
  pr->add_option("--fen", pa.fen, "Position (start of --moves when given)")->required();
  pr->add_option("--moves", pa.moves, "SAN moves played from --fen")->delimiter(' ');
  pr->add_option("--backend", pa.backend, "Score endpoint URL, or uniform")->required();
  pr->add_option("--out", pa.out, "Output directory")->required();
  pr->add_option("--segments", pa.segments, "Context segments: pgn, pieces, attacks")->delimiter(',');
  pr->add_option("--timeout-ms", pa.timeout_ms, "Backend read timeout");
  pr->add_option("--retries", pa.retries, "Retries on an unreachable backend");
  pr->callback([&] { status = run_probe(pa); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return status;
}
