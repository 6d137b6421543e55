#pragma once

#include <optional>
#include <string>
#include <vector>

#include "imli/common.hpp"
#include "imli/data.hpp"

namespace imli {

enum class LiteralKind { bool_pos, bool_neg, cat_eq, cat_neq, thr_ge, thr_lt };

enum class Comparison { ge, lt };

const char *to_string(LiteralKind kind);
std::optional<LiteralKind> literal_kind_from_string(const std::string &s);

// Provenance of one Boolean feature column.
struct LiteralMeta {
  std::size_t source_column = 0;
  std::string column_name;
  LiteralKind kind = LiteralKind::bool_pos;
  std::string category;  // cat_eq / cat_neq only
  double threshold = 0;  // thr_ge / thr_lt only

  bool is_threshold() const {
    return kind == LiteralKind::thr_ge || kind == LiteralKind::thr_lt;
  }
  std::optional<double> tval() const {
    if (!is_threshold()) return std::nullopt;
    return threshold;
  }
  std::optional<Comparison> op() const {
    if (!is_threshold()) return std::nullopt;
    return kind == LiteralKind::thr_ge ? Comparison::ge : Comparison::lt;
  }

  // Same literal with the opposite truth value.
  LiteralMeta complement() const;

  // Evaluates the literal against a raw cell value.
  bool holds(const std::string &cell) const;

  bool operator==(const LiteralMeta &) const = default;
};

// Threshold literals from the same source column with the same comparator.
bool siblings(const LiteralMeta &a, const LiteralMeta &b);

struct BinarizedDataset {
  BoolMatrix X;
  Labels y;
  std::vector<LiteralMeta> meta;

  std::size_t num_samples() const { return X.rows(); }
  std::size_t num_features() const { return X.cols(); }

  BinarizedDataset select_rows(const std::vector<std::size_t> &idx) const;
};

struct OneHot {
  std::vector<std::vector<std::uint8_t>> columns;
  std::vector<LiteralMeta> meta;
};

// Categories are ordered by first appearance.  Eq columns come first, then
// (optionally) their complements in the same order.
OneHot one_hot(const std::vector<std::string> &values, bool with_complements,
               std::size_t source_column = 0, const std::string &name = {});

// t thresholds at quantile levels i/(t+1), linear interpolation between
// order statistics, deduplicated.  Fewer than two distinct values yields an
// empty list.
std::vector<double> pick_thresholds(std::vector<double> values, std::size_t t);

// [x >= tau_1 .. x >= tau_t, x < tau_1 .. x < tau_t].  Throws DataError on NaN.
std::vector<std::uint8_t> binarize_continuous(double value,
                                              const std::vector<double> &thresholds);

struct BinarizeOptions {
  std::size_t thresholds = 4;
  bool with_complements = true;
};

struct ColumnEncoding {
  std::size_t source_column = 0;
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  std::vector<double> thresholds;       // continuous
  std::vector<std::string> categories;  // categorical
  std::size_t first_feature = 0;
  std::size_t feature_count = 0;
};

// Encoding fitted on one set of rows and applied to others, so held-out rows
// reuse training thresholds and categories.
class Binarizer {
 public:
  static Binarizer fit(const RawDataset &data, const BinarizeOptions &opts);

  BinarizedDataset transform(const RawDataset &data) const;

  const std::vector<LiteralMeta> &meta() const { return meta_; }
  const std::vector<ColumnEncoding> &columns() const { return columns_; }
  const std::vector<std::string> &warnings() const { return warnings_; }
  std::size_t num_features() const { return meta_.size(); }

  // Per-column feature counts, thresholds and categories as JSON text.
  std::string report_json() const;

 private:
  BinarizeOptions opts_;
  std::vector<ColumnEncoding> columns_;
  std::vector<LiteralMeta> meta_;
  std::vector<std::string> warnings_;
};

BinarizedDataset binarize(const RawDataset &data, std::size_t t, bool with_complements);

}  // namespace imli
