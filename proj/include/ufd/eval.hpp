#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ufd/corpus.hpp"

namespace ufd {

struct Confusion {
  std::size_t tp = 0;  // class 1 = frustrated
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t n() const { return tp + fp + fn + tn; }
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  Confusion confusion;
  std::array<ClassMetrics, 2> per_class;  // index = class label
  double macro_f1 = 0.0;
  std::size_t n = 0;
};

// Zero denominators give 0.
double harmonic_f1(double precision, double recall);
double macro_f1(double f1_class0, double f1_class1);
EvalReport report_from_confusion(const Confusion& c);

using LabeledId = std::pair<std::string, FrustrationLabel>;

// Throws ValidationError on duplicate ids or when the id sets differ (the
// message lists missing and extra ids).
EvalReport evaluate(std::span<const LabeledId> preds, std::span<const LabeledId> gold);

// Rounds half away from zero. Values within 1e-9 of a decimal tie are
// treated as the tie, so 0.865 prints as 0.87 despite binary representation.
double round_half_away(double x, int decimals);

struct NamedReport {
  std::string name;
  EvalReport report;
};

struct ComparisonTable {
  std::vector<NamedReport> rows;  // input order

  std::string to_text() const;
  std::string to_json() const;
};

ComparisonTable compare(std::vector<NamedReport> reports);  // throws ValidationError when empty

std::string report_to_json(const EvalReport& r);

struct AgreementReport {
  double kappa = 0.0;
  std::size_t n_items = 0;
  std::size_t n_raters = 0;
};

using RatingCounts = std::vector<std::vector<std::size_t>>;  // items x categories

// Fleiss' kappa. Throws ValidationError when items have different rater
// totals or fewer than 2 raters, NumericError when all ratings fall into one
// category (chance agreement 1, kappa undefined).
AgreementReport fleiss_kappa(const RatingCounts& counts);

// Ratings JSONL: {"id": str, "ratings": [0|1, ...]} with a constant length.
RatingCounts load_ratings(const std::filesystem::path& path);
RatingCounts parse_ratings(std::string_view jsonl);

}  // namespace ufd
