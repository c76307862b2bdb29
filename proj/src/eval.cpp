#include "ufd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>

#include "ufd/error.hpp"
#include "ufd/fileio.hpp"

namespace ufd {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics class_metrics(std::size_t correct, std::size_t predicted, std::size_t actual) {
  ClassMetrics m;
  m.precision = ratio(correct, predicted);
  m.recall = ratio(correct, actual);
  m.f1 = harmonic_f1(m.precision, m.recall);
  return m;
}

std::map<std::string, FrustrationLabel> index_by_id(std::span<const LabeledId> xs, const char* what) {
  std::map<std::string, FrustrationLabel> out;
  for (const auto& [id, label] : xs)
    if (!out.emplace(id, label).second) throw ValidationError(std::string("duplicate id in ") + what + ": \"" + id + "\"");
  return out;
}

std::string fmt2(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << round_half_away(v, 2);
  return ss.str();
}

}  // namespace

double harmonic_f1(double precision, double recall) {
  return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

double macro_f1(double f1_class0, double f1_class1) { return (f1_class0 + f1_class1) / 2.0; }

EvalReport report_from_confusion(const Confusion& c) {
  EvalReport r;
  r.confusion = c;
  r.n = c.n();
  r.per_class[1] = class_metrics(c.tp, c.tp + c.fp, c.tp + c.fn);
  r.per_class[0] = class_metrics(c.tn, c.tn + c.fn, c.tn + c.fp);
  r.macro_f1 = macro_f1(r.per_class[0].f1, r.per_class[1].f1);
  return r;
}

EvalReport evaluate(std::span<const LabeledId> preds, std::span<const LabeledId> gold) {
  const auto p = index_by_id(preds, "predictions");
  const auto g = index_by_id(gold, "gold");
  std::vector<std::string> missing, extra;
  for (const auto& [id, _] : g)
    if (!p.count(id)) missing.push_back(id);
  for (const auto& [id, _] : p)
    if (!g.count(id)) extra.push_back(id);
  if (!missing.empty() || !extra.empty()) {
    auto list = [](const std::vector<std::string>& ids) {
      std::string s;
      for (std::size_t i = 0; i < ids.size() && i < 20; ++i) s += (i ? ", " : "") + ids[i];
      if (ids.size() > 20) s += ", ... (" + std::to_string(ids.size()) + " total)";
      return s;
    };
    std::string msg = "prediction ids do not match gold ids";
    if (!missing.empty()) msg += "; missing predictions for: " + list(missing);
    if (!extra.empty()) msg += "; predictions for unknown ids: " + list(extra);
    throw ValidationError(msg);
  }
  Confusion c;
  for (const auto& [id, gl] : g) {
    const bool pred = p.at(id).is_frustrated();
    const bool truth = gl.is_frustrated();
    if (pred && truth) ++c.tp;
    else if (pred) ++c.fp;
    else if (truth) ++c.fn;
    else ++c.tn;
  }
  return report_from_confusion(c);
}

double round_half_away(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double y = std::fabs(x) * scale;
  double r = std::floor(y);
  if (y - r >= 0.5 - 1e-9 * std::max(1.0, y)) r += 1.0;
  return std::copysign(r / scale, x);
}

ComparisonTable compare(std::vector<NamedReport> reports) {
  if (reports.empty()) throw ValidationError("compare: no reports");
  return ComparisonTable{std::move(reports)};
}

std::string ComparisonTable::to_text() const {
  std::size_t name_w = 8;
  for (const auto& r : rows) name_w = std::max(name_w, r.name.size());
  std::ostringstream o;
  o << std::left << std::setw(static_cast<int>(name_w)) << "" << "  " << "UF = 0 (not frustrated)"
    << "   " << "UF = 1 (frustrated)\n";
  o << std::setw(static_cast<int>(name_w)) << "detector"
    << "  P     R     F1      P     R     F1      Macro-F1\n";
  for (const auto& row : rows) {
    const auto& pc = row.report.per_class;
    o << std::left << std::setw(static_cast<int>(name_w)) << row.name << "  " << fmt2(pc[0].precision) << "  "
      << fmt2(pc[0].recall) << "  " << fmt2(pc[0].f1) << "    " << fmt2(pc[1].precision) << "  "
      << fmt2(pc[1].recall) << "  " << fmt2(pc[1].f1) << "    " << fmt2(row.report.macro_f1) << "\n";
  }
  o << "# values rounded half away from zero to 2 decimals; raw values in the JSON report\n";
  return o.str();
}

namespace {

nlohmann::ordered_json report_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["confusion"] = {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn}, {"tn", r.confusion.tn}};
  nlohmann::ordered_json pc = nlohmann::ordered_json::object();
  for (int c = 0; c < 2; ++c)
    pc[std::to_string(c)] = {{"precision", r.per_class[static_cast<std::size_t>(c)].precision},
                             {"recall", r.per_class[static_cast<std::size_t>(c)].recall},
                             {"f1", r.per_class[static_cast<std::size_t>(c)].f1}};
  j["per_class"] = std::move(pc);
  j["macro_f1"] = r.macro_f1;
  return j;
}

}  // namespace

std::string report_to_json(const EvalReport& r) { return report_json(r).dump(2); }

std::string ComparisonTable::to_json() const {
  nlohmann::ordered_json j;
  j["rounding"] = "half away from zero, 2 decimals (text table only)";
  j["reports"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    auto r = report_json(row.report);
    r["name"] = row.name;
    nlohmann::ordered_json rounded;
    for (int c = 0; c < 2; ++c) {
      const auto& m = row.report.per_class[static_cast<std::size_t>(c)];
      rounded[std::to_string(c)] = {{"precision", round_half_away(m.precision, 2)},
                                    {"recall", round_half_away(m.recall, 2)},
                                    {"f1", round_half_away(m.f1, 2)}};
    }
    rounded["macro_f1"] = round_half_away(row.report.macro_f1, 2);
    r["rounded"] = std::move(rounded);
    j["reports"].push_back(std::move(r));
  }
  return j.dump(2);
}

AgreementReport fleiss_kappa(const RatingCounts& counts) {
  if (counts.empty()) throw ValidationError("fleiss_kappa: no items");
  const std::size_t k = counts.front().size();
  if (k < 2) throw ValidationError("fleiss_kappa: need at least 2 categories");
  std::size_t raters = 0;
  for (std::size_t c : counts.front()) raters += c;
  if (raters < 2) throw ValidationError("fleiss_kappa: need at least 2 raters per item");

  std::vector<double> category_totals(k, 0.0);
  double sum_pi = 0.0;
  const double r = static_cast<double>(raters);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].size() != k) throw ValidationError("fleiss_kappa: item " + std::to_string(i) + " has a different category count");
    std::size_t total = 0;
    double sq = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      total += counts[i][j];
      sq += static_cast<double>(counts[i][j]) * static_cast<double>(counts[i][j]);
      category_totals[j] += static_cast<double>(counts[i][j]);
    }
    if (total != raters)
      throw ValidationError("fleiss_kappa: item " + std::to_string(i) + " has " + std::to_string(total) +
                            " ratings, expected " + std::to_string(raters));
    sum_pi += (sq - r) / (r * (r - 1.0));
  }
  const double n_items = static_cast<double>(counts.size());
  const double p_bar = sum_pi / n_items;
  double pe = 0.0;
  for (double t : category_totals) {
    const double pj = t / (n_items * r);
    pe += pj * pj;
  }
  if (pe >= 1.0 - 1e-15)
    throw NumericError("fleiss_kappa: all ratings fall into a single category; kappa is undefined");
  return {(p_bar - pe) / (1.0 - pe), counts.size(), raters};
}

RatingCounts parse_ratings(std::string_view jsonl) {
  RatingCounts out;
  std::istringstream in{std::string(jsonl)};
  std::size_t line_no = 0;
  std::optional<std::size_t> width;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("ratings") || !j["ratings"].is_array())
      throw ValidationError("ratings record needs a \"ratings\" array", line_no);
    const auto& rs = j["ratings"];
    if (width && rs.size() != *width)
      throw ValidationError("unequal rater count: expected " + std::to_string(*width) + ", got " +
                                std::to_string(rs.size()),
                            line_no);
    width = rs.size();
    std::vector<std::size_t> row(2, 0);
    for (const auto& v : rs) {
      if (!v.is_number_integer() || (v.get<long long>() != 0 && v.get<long long>() != 1))
        throw ValidationError("ratings must be 0 or 1", line_no);
      ++row[v.get<std::size_t>()];
    }
    out.push_back(std::move(row));
  }
  if (out.empty()) throw ValidationError("ratings file has no records");
  return out;
}

RatingCounts load_ratings(const std::filesystem::path& path) { return parse_ratings(read_file(path)); }

}  // namespace ufd
