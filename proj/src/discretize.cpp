#include "imli/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

namespace imli {

const char *to_string(LiteralKind kind) {
  switch (kind) {
    case LiteralKind::bool_pos: return "bool_pos";
    case LiteralKind::bool_neg: return "bool_neg";
    case LiteralKind::cat_eq: return "cat_eq";
    case LiteralKind::cat_neq: return "cat_neq";
    case LiteralKind::thr_ge: return "thr_ge";
    case LiteralKind::thr_lt: return "thr_lt";
  }
  return "?";
}

std::optional<LiteralKind> literal_kind_from_string(const std::string &s) {
  for (auto k : {LiteralKind::bool_pos, LiteralKind::bool_neg, LiteralKind::cat_eq,
                 LiteralKind::cat_neq, LiteralKind::thr_ge, LiteralKind::thr_lt})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

LiteralMeta LiteralMeta::complement() const {
  LiteralMeta out = *this;
  switch (kind) {
    case LiteralKind::bool_pos: out.kind = LiteralKind::bool_neg; break;
    case LiteralKind::bool_neg: out.kind = LiteralKind::bool_pos; break;
    case LiteralKind::cat_eq: out.kind = LiteralKind::cat_neq; break;
    case LiteralKind::cat_neq: out.kind = LiteralKind::cat_eq; break;
    case LiteralKind::thr_ge: out.kind = LiteralKind::thr_lt; break;
    case LiteralKind::thr_lt: out.kind = LiteralKind::thr_ge; break;
  }
  return out;
}

bool LiteralMeta::holds(const std::string &cell) const {
  if (kind == LiteralKind::cat_eq) return cell == category;
  if (kind == LiteralKind::cat_neq) return cell != category;
  auto v = parse_number(cell);
  if (!v || std::isnan(*v))
    throw DataError("non-numeric value '" + cell + "' in column '" + column_name + "'");
  switch (kind) {
    case LiteralKind::bool_pos: return *v == 1.0;
    case LiteralKind::bool_neg: return *v != 1.0;
    case LiteralKind::thr_ge: return *v >= threshold;
    case LiteralKind::thr_lt: return *v < threshold;
    default: return false;
  }
}

bool siblings(const LiteralMeta &a, const LiteralMeta &b) {
  return a.is_threshold() && b.is_threshold() && a.source_column == b.source_column &&
         a.kind == b.kind;
}

BinarizedDataset BinarizedDataset::select_rows(const std::vector<std::size_t> &idx) const {
  BinarizedDataset out;
  out.X = X.select_rows(idx);
  out.meta = meta;
  out.y.reserve(idx.size());
  for (std::size_t i : idx) out.y.push_back(y.at(i));
  return out;
}

namespace {

std::vector<std::string> categories_of(const std::vector<std::string> &values) {
  std::vector<std::string> cats;
  for (const auto &v : values)
    if (std::find(cats.begin(), cats.end(), v) == cats.end()) cats.push_back(v);
  return cats;
}

}  // namespace

OneHot one_hot(const std::vector<std::string> &values, bool with_complements,
               std::size_t source_column, const std::string &name) {
  const auto cats = categories_of(values);
  OneHot out;
  for (int neg = 0; neg < (with_complements ? 2 : 1); ++neg) {
    for (const auto &cat : cats) {
      std::vector<std::uint8_t> col(values.size());
      for (std::size_t r = 0; r < values.size(); ++r)
        col[r] = static_cast<std::uint8_t>((values[r] == cat) != (neg == 1));
      out.columns.push_back(std::move(col));
      out.meta.push_back({source_column, name,
                          neg ? LiteralKind::cat_neq : LiteralKind::cat_eq, cat, 0.0});
    }
  }
  return out;
}

std::vector<double> pick_thresholds(std::vector<double> values, std::size_t t) {
  if (t < 1) throw UsageError("threshold count must be at least 1");
  for (double v : values)
    if (std::isnan(v)) throw DataError("NaN in continuous column");
  std::sort(values.begin(), values.end());
  if (values.empty() || values.front() == values.back()) return {};

  std::vector<double> out;
  const double last = static_cast<double>(values.size() - 1);
  for (std::size_t i = 1; i <= t; ++i) {
    const double h = last * static_cast<double>(i) / static_cast<double>(t + 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - static_cast<double>(lo);
    const double q = values[lo] + frac * (values[hi] - values[lo]);
    if (out.empty() || q > out.back()) out.push_back(q);
  }
  return out;
}

std::vector<std::uint8_t> binarize_continuous(double value,
                                              const std::vector<double> &thresholds) {
  if (std::isnan(value)) throw DataError("cannot binarize NaN");
  const std::size_t t = thresholds.size();
  std::vector<std::uint8_t> bits(2 * t);
  for (std::size_t i = 0; i < t; ++i) {
    bits[i] = value >= thresholds[i];
    bits[t + i] = value < thresholds[i];
  }
  return bits;
}

Binarizer Binarizer::fit(const RawDataset &data, const BinarizeOptions &opts) {
  Binarizer b;
  b.opts_ = opts;
  std::size_t next = 0;
  for (std::size_t c : data.feature_columns()) {
    ColumnEncoding enc;
    enc.source_column = c;
    enc.name = data.column_names[c];
    enc.kind = data.column_kinds[c];
    enc.first_feature = next;
    const auto &name = enc.name;

    switch (enc.kind) {
      case ColumnKind::binary: {
        b.meta_.push_back({c, name, LiteralKind::bool_pos, {}, 0.0});
        if (opts.with_complements) b.meta_.push_back({c, name, LiteralKind::bool_neg, {}, 0.0});
        break;
      }
      case ColumnKind::categorical: {
        std::vector<std::string> vals;
        for (const auto &row : data.rows) vals.push_back(row[c]);
        enc.categories = categories_of(vals);
        for (int neg = 0; neg < (opts.with_complements ? 2 : 1); ++neg)
          for (const auto &cat : enc.categories)
            b.meta_.push_back(
                {c, name, neg ? LiteralKind::cat_neq : LiteralKind::cat_eq, cat, 0.0});
        break;
      }
      case ColumnKind::continuous: {
        enc.thresholds = pick_thresholds(data.numeric_column(c), opts.thresholds);
        if (enc.thresholds.empty())
          b.warnings_.push_back("column '" + name + "' is constant; no features emitted");
        for (double tau : enc.thresholds)
          b.meta_.push_back({c, name, LiteralKind::thr_ge, {}, tau});
        for (double tau : enc.thresholds)
          b.meta_.push_back({c, name, LiteralKind::thr_lt, {}, tau});
        break;
      }
    }
    enc.feature_count = b.meta_.size() - next;
    next = b.meta_.size();
    b.columns_.push_back(std::move(enc));
  }
  return b;
}

BinarizedDataset Binarizer::transform(const RawDataset &data) const {
  BinarizedDataset out;
  out.meta = meta_;
  out.y = data.labels();
  out.X = BoolMatrix(data.num_rows(), meta_.size());
  for (const auto &enc : columns_) {
    if (enc.source_column >= data.num_columns() ||
        data.column_names[enc.source_column] != enc.name)
      throw DataError("column '" + enc.name + "' missing or moved in input data");
    for (std::size_t r = 0; r < data.num_rows(); ++r) {
      if (enc.kind == ColumnKind::continuous) {
        const auto bits = binarize_continuous(data.numeric(r, enc.source_column), enc.thresholds);
        for (std::size_t i = 0; i < bits.size(); ++i) out.X(r, enc.first_feature + i) = bits[i];
      } else {
        for (std::size_t i = 0; i < enc.feature_count; ++i) {
          const auto &m = meta_[enc.first_feature + i];
          out.X(r, enc.first_feature + i) = m.holds(data.rows[r][enc.source_column]);
        }
      }
    }
  }
  return out;
}

std::string Binarizer::report_json() const {
  nlohmann::json j;
  j["thresholds_per_column"] = opts_.thresholds;
  j["with_complements"] = opts_.with_complements;
  j["features"] = meta_.size();
  j["columns"] = nlohmann::json::array();
  for (const auto &enc : columns_) {
    nlohmann::json c;
    c["name"] = enc.name;
    c["kind"] = to_string(enc.kind);
    c["features"] = enc.feature_count;
    if (enc.kind == ColumnKind::continuous) c["thresholds"] = enc.thresholds;
    if (enc.kind == ColumnKind::categorical) c["categories"] = enc.categories;
    j["columns"].push_back(std::move(c));
  }
  j["warnings"] = warnings_;
  return j.dump(2);
}

BinarizedDataset binarize(const RawDataset &data, std::size_t t, bool with_complements) {
  return Binarizer::fit(data, {t, with_complements}).transform(data);
}

}  // namespace imli
