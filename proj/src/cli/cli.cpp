#include "cli.hpp"

#include <CLI11.hpp>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>

#include "ufd/corpus.hpp"
#include "ufd/dbd.hpp"
#include "ufd/detection.hpp"
#include "ufd/embeddings.hpp"
#include "ufd/emowoz.hpp"
#include "ufd/error.hpp"
#include "ufd/eval.hpp"
#include "ufd/fileio.hpp"
#include "ufd/keyword.hpp"
#include "ufd/llm.hpp"
#include "ufd/textmetrics.hpp"

namespace ufd::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string corpus;
  std::string out;
  std::size_t jobs = 4;
  std::uint64_t seed = 0;
};

struct EmbedOptions {
  std::string url;
  std::size_t dim = HashingEmbedder::kDefaultDim;
};

struct DetectOptions {
  std::string detector;
  std::string keywords;
  std::string model;
  double threshold = 0.5;
  std::string llm_url;
  std::string shots;
  std::string prompt_dir;
  double temperature = 0.0;
  double timeout_s = 60.0;
  int max_retries = 3;
  int backoff_ms = 500;
};

struct TrainOptions {
  double lr = 0.1;
  std::size_t epochs = 500;
  double lambda = 1e-3;
};

struct EvalOptions {
  std::string gold;
  std::vector<std::string> preds;
};

struct StatsCliOptions {
  double fuzzy = 0.8;
  double cosine = 0.9;
  bool no_embed = false;
};

std::string require_path(const std::string& value, const char* flag, const char* cmd) {
  if (value.empty()) throw UsageError(std::string(cmd) + " requires " + flag);
  if (!fs::exists(value)) throw UsageError(std::string(flag) + ": file not found: " + value);
  return value;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-")
    out << content;
  else
    write_file_atomic(path, content);
}

std::shared_ptr<const EmbeddingProvider> make_embedder(const EmbedOptions& o) {
  std::string url = o.url;
  if (url.empty()) url = env_value("EMBED_BASE_URL").value_or("");
  if (url.empty()) return std::make_shared<HashingEmbedder>(o.dim);
  auto cfg = RemoteEmbedderConfig::from_env();
  cfg.base_url = url;
  return std::make_shared<RemoteEmbedder>(cfg);
}

void add_embed_options(CLI::App* cmd, EmbedOptions& o) {
  cmd->add_option("--embed-url", o.url, "Remote embedding service base URL (env EMBED_BASE_URL)");
  cmd->add_option("--embed-dim", o.dim, "Dimension of the local hashing embedder")->check(CLI::PositiveNumber);
}

std::string label_summary(std::span<const DetectionResult> preds) {
  std::size_t pos = 0;
  for (const auto& p : preds) pos += p.label.is_frustrated() ? 1 : 0;
  return "predicted " + std::to_string(preds.size()) + " dialogs: label 0 = " + std::to_string(preds.size() - pos) +
         ", label 1 = " + std::to_string(pos);
}

int cmd_detect(const GlobalOptions& g, const DetectOptions& o, const EmbedOptions& e, std::ostream& out,
               std::ostream& err) {
  const auto corpus = load_corpus(require_path(g.corpus, "--corpus", "detect"));
  std::unique_ptr<Detector> det;
  if (o.detector == "keyword") {
    det = std::make_unique<KeywordDetector>(load_keywords(require_path(o.keywords, "--keywords", "detect --detector keyword")));
  } else if (o.detector == "dbd") {
    auto model = load_model(require_path(o.model, "--model", "detect --detector dbd"));
    auto embed = make_embedder(e);
    if (!model.embedder.empty() && model.embedder != embed->name())
      err << "warning: model was trained with embedder " << model.embedder << ", using " << embed->name() << "\n";
    det = std::make_unique<DbdDetector>(std::move(model), std::move(embed), o.threshold);
  } else if (o.detector == "llm") {
    LlmConfig cfg;
    cfg.base_url = o.llm_url.empty() ? env_value("LLM_BASE_URL").value_or("") : o.llm_url;
    cfg.model = o.model;
    cfg.temperature = o.temperature;
    cfg.timeout = std::chrono::milliseconds(static_cast<long long>(o.timeout_s * 1000.0));
    cfg.max_retries = o.max_retries;
    cfg.initial_backoff = std::chrono::milliseconds(o.backoff_ms);
    cfg.max_in_flight = static_cast<std::ptrdiff_t>(g.jobs);
    if (cfg.base_url.empty()) throw UsageError("detect --detector llm requires --llm-url or LLM_BASE_URL");
    if (cfg.model.empty()) throw UsageError("detect --detector llm requires --model <name>");
    std::vector<Dialog> shots;
    if (!o.shots.empty()) shots = load_shots(require_path(o.shots, "--shots", "detect"));
    auto tmpl = o.prompt_dir.empty() ? PromptTemplate::canonical() : PromptTemplate::load(o.prompt_dir);
    det = std::make_unique<LlmDetector>(std::make_shared<HttpChatClient>(cfg), std::move(shots), std::move(tmpl));
  } else {
    throw UsageError("unknown --detector \"" + o.detector + "\" (keyword, dbd, llm)");
  }

  const auto items = detect_batch(*det, corpus, g.jobs);
  std::vector<DetectionResult> preds;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].ok()) {
      preds.push_back(*items[i].result);
    } else {
      ++failures;
      err << "error: dialog \"" << corpus[i].id() << "\": " << items[i].error << "\n";
    }
  }
  if (failures) throw Error(std::to_string(failures) + " of " + std::to_string(corpus.size()) + " dialogs failed");

  std::string body;
  for (const auto& p : preds) body += to_prediction_line(p) + "\n";
  emit(g.out, body, out);
  err << det->name() << ": " << label_summary(preds) << "\n";
  return kOk;
}

int cmd_train(const GlobalOptions& g, const TrainOptions& o, const EmbedOptions& e, std::ostream& out) {
  const auto corpus = load_corpus(require_path(g.corpus, "--corpus", "train-dbd"));
  if (g.out.empty()) throw UsageError("train-dbd requires --out <model.json>");
  for (const auto& d : corpus)
    if (!d.gold_label()) throw ValidationError("train-dbd needs labeled dialogs; \"" + d.id() + "\" has no label");
  auto embed = make_embedder(e);
  const auto feats = extract_features_batch(corpus, *embed, g.jobs);
  std::vector<std::pair<FeatureVector, FrustrationLabel>> data;
  for (std::size_t i = 0; i < corpus.size(); ++i) data.emplace_back(feats[i], *corpus[i].gold_label());

  auto model = train_lr(data, TrainHyper{o.lr, o.epochs, o.lambda, g.seed});
  model.embedder = embed->name();
  std::size_t correct = 0;
  for (const auto& [x, y] : data) correct += predict_lr(model, x).label == y ? 1 : 0;
  save_model(g.out, model);
  out << std::setprecision(6) << "final loss: " << model.final_loss << "\n"
      << "training accuracy: " << static_cast<double>(correct) / static_cast<double>(data.size()) << " (" << correct
      << "/" << data.size() << ")\n";
  return kOk;
}

std::vector<LabeledId> gold_labels(const Corpus& corpus) {
  std::vector<LabeledId> out;
  for (const auto& d : corpus) {
    if (!d.gold_label()) throw ValidationError("gold dialog \"" + d.id() + "\" has no label");
    out.emplace_back(d.id(), *d.gold_label());
  }
  return out;
}

int cmd_evaluate(const GlobalOptions& g, const EvalOptions& o, std::ostream& out) {
  std::string gold_path = o.gold.empty() ? g.corpus : o.gold;
  const auto gold = gold_labels(load_corpus(require_path(gold_path, "--gold", "evaluate")));
  if (o.preds.empty()) throw UsageError("evaluate requires at least one --pred file");
  std::vector<NamedReport> reports;
  for (const auto& path : o.preds) {
    const auto preds = load_predictions(require_path(path, "--pred", "evaluate"));
    std::vector<LabeledId> p;
    for (const auto& r : preds) p.emplace_back(r.dialog_id, r.label);
    std::string name = !preds.empty() && !preds.front().detector.empty() ? preds.front().detector
                                                                          : fs::path(path).stem().string();
    if (o.preds.size() > 1) {
      for (const auto& r : reports)
        if (r.name == name) name = fs::path(path).stem().string();
    }
    reports.push_back({name, evaluate(p, gold)});
  }
  const auto table = compare(std::move(reports));
  if (!g.out.empty()) write_file_atomic(g.out, table.to_json() + "\n");
  out << table.to_text();
  return kOk;
}

int cmd_stats(const GlobalOptions& g, const StatsCliOptions& o, const EmbedOptions& e, std::ostream& out) {
  const auto corpus = load_corpus(require_path(g.corpus, "--corpus", "stats"));
  StatsOptions opts{o.fuzzy, o.cosine};
  std::shared_ptr<const EmbeddingProvider> embed;
  if (!o.no_embed) embed = make_embedder(e);
  const auto s = corpus_stats(corpus, embed.get(), opts);
  if (!g.out.empty()) write_file_atomic(g.out, stats_to_json(s, opts) + "\n");
  out << stats_to_text(s, opts);
  return kOk;
}

int cmd_agreement(const GlobalOptions& g, const std::string& ratings, std::ostream& out) {
  const auto report = fleiss_kappa(load_ratings(require_path(ratings, "--ratings", "agreement")));
  nlohmann::ordered_json j{{"kappa", report.kappa}, {"n_items", report.n_items}, {"n_raters", report.n_raters}};
  if (!g.out.empty()) write_file_atomic(g.out, j.dump(2) + "\n");
  out << std::fixed << std::setprecision(4) << "Fleiss' kappa: " << report.kappa << "  (items: " << report.n_items
      << ", raters: " << report.n_raters << ")\n";
  return kOk;
}

int cmd_redact(const GlobalOptions& g, const std::string& patterns, std::ostream& out) {
  const auto corpus = load_corpus(require_path(g.corpus, "--corpus", "redact"));
  if (g.out.empty()) throw UsageError("redact requires --out <corpus.jsonl>");
  const Redactor redactor(load_patterns(require_path(patterns, "--patterns", "redact")));
  Corpus result;
  std::size_t changed = 0;
  for (const auto& d : corpus) {
    result.push_back(redactor.redact(d));
    changed += result.back() == d ? 0 : 1;
  }
  save_corpus(g.out, result);
  out << "redacted " << changed << " of " << corpus.size() << " dialogs with " << redactor.num_patterns()
      << " patterns\n";
  return kOk;
}

int cmd_convert_emowoz(const GlobalOptions& g, const std::string& input, std::ostream& out, std::ostream& err) {
  if (g.out.empty()) throw UsageError("convert-emowoz requires --out <corpus.jsonl>");
  const auto conv = convert_emowoz(read_file(require_path(input, "--input", "convert-emowoz")));
  for (const auto& s : conv.skipped) err << "skipped " << s << "\n";
  save_corpus(g.out, conv.dialogs);
  std::size_t pos = 0;
  for (const auto& d : conv.dialogs) pos += d.gold_label()->is_frustrated() ? 1 : 0;
  out << "converted " << conv.dialogs.size() << " dialogs (" << pos << " frustrated), skipped "
      << conv.skipped.size() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ufd: user frustration detection for task-oriented dialogs"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  GlobalOptions g;
  app.add_option("--corpus", g.corpus, "Corpus JSONL file");
  app.add_option("--out", g.out, "Output file (written atomically)");
  app.add_option("--jobs", g.jobs, "Maximum concurrent embedding/LLM requests")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Random seed recorded with training runs");

  EmbedOptions embed;

  DetectOptions det;
  auto* detect = app.add_subcommand("detect", "Label every dialog of a corpus with one detector");
  detect->add_option("--detector", det.detector, "keyword | dbd | llm")->required();
  detect->add_option("--keywords", det.keywords, "Keyword file (keyword detector)");
  detect->add_option("--model", det.model, "Model file (dbd) or model name (llm)");
  detect->add_option("--threshold", det.threshold, "Decision threshold for dbd scores");
  detect->add_option("--llm-url", det.llm_url, "Chat-completions base URL (env LLM_BASE_URL)");
  detect->add_option("--shots", det.shots, "Labeled exemplar dialogs (JSONL)");
  detect->add_option("--prompt-dir", det.prompt_dir, "Directory overriding the prompt blocks");
  detect->add_option("--temperature", det.temperature, "Sampling temperature")->check(CLI::NonNegativeNumber);
  detect->add_option("--timeout", det.timeout_s, "Per-request timeout in seconds")->check(CLI::PositiveNumber);
  detect->add_option("--max-retries", det.max_retries, "Retries on transport errors and 5xx")->check(CLI::NonNegativeNumber);
  detect->add_option("--backoff-ms", det.backoff_ms, "Initial retry backoff in milliseconds")->check(CLI::NonNegativeNumber);
  add_embed_options(detect, embed);

  TrainOptions tr;
  auto* train = app.add_subcommand("train-dbd", "Train the dialog-breakdown logistic regression");
  train->add_option("--lr", tr.lr, "Learning rate")->check(CLI::PositiveNumber);
  train->add_option("--epochs", tr.epochs, "Full-batch gradient steps");
  train->add_option("--lambda", tr.lambda, "L2 penalty")->check(CLI::NonNegativeNumber);
  add_embed_options(train, embed);

  EvalOptions ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Per-class P/R/F1 and macro-F1 against gold labels");
  evaluate_cmd->add_option("--gold", ev.gold, "Labeled corpus (defaults to --corpus)");
  evaluate_cmd->add_option("--pred", ev.preds, "Prediction JSONL; repeat for a comparison table")->required();

  StatsCliOptions st;
  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("--fuzzy-threshold", st.fuzzy, "Levenshtein similarity threshold")->check(CLI::Range(0.0, 1.0));
  stats->add_option("--cosine-threshold", st.cosine, "Cosine similarity threshold")->check(CLI::Range(0.0, 1.0));
  stats->add_flag("--no-embed", st.no_embed, "Skip the cosine repetition rate");
  add_embed_options(stats, embed);

  std::string ratings;
  auto* agreement = app.add_subcommand("agreement", "Fleiss' kappa over annotator ratings");
  agreement->add_option("--ratings", ratings, "Ratings JSONL")->required();

  std::string patterns;
  auto* redact_cmd = app.add_subcommand("redact", "Replace regex matches with [REDACTED]");
  redact_cmd->add_option("--patterns", patterns, "One regex per line")->required();

  std::string emowoz_input;
  auto* convert = app.add_subcommand("convert-emowoz", "Convert the EmoWOZ release into a labeled corpus");
  convert->add_option("--input", emowoz_input, "EmoWOZ JSON file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsageError;
  }

  try {
    if (*detect) return cmd_detect(g, det, embed, out, err);
    if (*train) return cmd_train(g, tr, embed, out);
    if (*evaluate_cmd) return cmd_evaluate(g, ev, out);
    if (*stats) return cmd_stats(g, st, embed, out);
    if (*agreement) return cmd_agreement(g, ratings, out);
    if (*redact_cmd) return cmd_redact(g, patterns, out);
    if (*convert) return cmd_convert_emowoz(g, emowoz_input, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace ufd::cli
