#include "imli/data.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace imli {

const char *to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::binary: return "binary";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::continuous: return "continuous";
  }
  return "?";
}

std::optional<std::size_t> Table::column_index(const std::string &name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

namespace {

std::string trim(const std::string &s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

}  // namespace

Table parse_csv(const std::string &text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;
  bool any = false;

  auto end_field = [&] {
    record.push_back(field_quoted ? field : trim(field));
    field.clear();
    field_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    // A blank line is a single empty unquoted field.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  std::size_t i = 0;
  if (text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && trim(field).empty()) {
      field.clear();
      in_quotes = true;
      field_quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
      any = false;
    } else if (c == '\n') {
      end_record();
      any = false;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field in CSV");
  if (any) end_record();

  Table t;
  if (records.empty()) throw DataError("CSV has no header row");
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size()) {
      throw DataError("CSV row " + std::to_string(r) + " has " +
                      std::to_string(records[r].size()) + " cells, header has " +
                      std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

Table read_csv(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

bool is_missing(const std::string &cell) {
  return cell.empty() || cell == "?" || cell == "NA" || cell == "NaN" || cell == "nan";
}

std::optional<double> parse_number(const std::string &cell) {
  if (cell.empty()) return std::nullopt;
  const char *b = cell.data();
  const char *e = b + cell.size();
  if (*b == '+') ++b;
  double v = 0;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) return std::nullopt;
  return v;
}

std::vector<std::size_t> RawDataset::feature_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < column_names.size(); ++c)
    if (c != label_column) out.push_back(c);
  return out;
}

Labels RawDataset::labels() const {
  Labels y(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    y[r] = rows[r][label_column] == positive_label ? 1 : 0;
  return y;
}

void RawDataset::finalize() {
  numbers_.assign(column_names.size(), {});
  for (std::size_t c : feature_columns()) {
    if (column_kinds[c] == ColumnKind::categorical) continue;
    auto &col = numbers_[c];
    col.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      auto v = parse_number(rows[r][c]);
      if (!v) {
        throw DataError("non-numeric value '" + rows[r][c] + "' in " +
                        to_string(column_kinds[c]) + " column '" + column_names[c] + "'");
      }
      col[r] = *v;
    }
  }
}

namespace {

ColumnKind infer_kind(const std::vector<std::vector<std::string>> &rows, std::size_t c) {
  bool numeric = true;
  bool zero_one = true;
  bool seen = false;
  for (const auto &row : rows) {
    const auto &cell = row[c];
    if (is_missing(cell)) continue;
    seen = true;
    auto v = parse_number(cell);
    if (!v) {
      numeric = false;
      break;
    }
    if (*v != 0.0 && *v != 1.0) zero_one = false;
  }
  if (!seen || !numeric) return ColumnKind::categorical;
  return zero_one ? ColumnKind::binary : ColumnKind::continuous;
}

std::string impute_value(const std::vector<std::vector<std::string>> &rows, std::size_t c,
                         ColumnKind kind) {
  if (kind == ColumnKind::continuous) {
    std::vector<double> vals;
    for (const auto &row : rows)
      if (!is_missing(row[c])) vals.push_back(*parse_number(row[c]));
    std::sort(vals.begin(), vals.end());
    const std::size_t n = vals.size();
    const double med = n % 2 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
    std::ostringstream os;
    os.precision(17);
    os << med;
    return os.str();
  }
  // Mode; ties go to the value seen first.
  std::map<std::string, std::size_t> counts;
  std::vector<std::string> order;
  for (const auto &row : rows) {
    if (is_missing(row[c])) continue;
    if (counts[row[c]]++ == 0) order.push_back(row[c]);
  }
  std::string best;
  std::size_t best_count = 0;
  for (const auto &v : order) {
    if (counts[v] > best_count) {
      best = v;
      best_count = counts[v];
    }
  }
  return best;
}

}  // namespace

RawDataset make_dataset(Table table, const std::string &label,
                        const std::string &positive_label, const LoadOptions &opts) {
  auto label_idx = table.column_index(label);
  if (!label_idx) throw DataError("label column '" + label + "' not found");

  RawDataset d;
  d.column_names = table.header;
  d.label_column = *label_idx;
  d.positive_label = positive_label;
  d.rows = std::move(table.rows);

  for (std::size_t r = 0; r < d.rows.size(); ++r) {
    if (is_missing(d.rows[r][d.label_column]))
      throw DataError("missing label at row " + std::to_string(r + 1));
  }
  if (d.rows.empty()) throw DataError("dataset has no rows");

  std::set<std::string> values;
  for (const auto &row : d.rows) values.insert(row[d.label_column]);
  if (values.size() < 2)
    throw DataError("label column '" + label + "' has fewer than 2 distinct values");
  if (!values.count(positive_label))
    throw DataError("positive label '" + positive_label + "' does not occur in column '" +
                    label + "'");
  if (values.size() > 2 && !opts.one_vs_rest)
    throw DataError("label column '" + label + "' has " + std::to_string(values.size()) +
                    " distinct values; binary labels required");

  d.column_kinds.assign(d.column_names.size(), ColumnKind::categorical);
  for (std::size_t c : d.feature_columns()) {
    const ColumnKind kind = infer_kind(d.rows, c);
    d.column_kinds[c] = kind;
    bool has_missing = false;
    for (std::size_t r = 0; r < d.rows.size(); ++r) {
      if (!is_missing(d.rows[r][c])) continue;
      if (!opts.impute) {
        throw DataError("missing value at row " + std::to_string(r + 1) + ", column '" +
                        d.column_names[c] + "'");
      }
      has_missing = true;
    }
    if (has_missing) {
      const std::string fill = impute_value(d.rows, c, kind);
      if (fill.empty())
        throw DataError("column '" + d.column_names[c] + "' has no values to impute from");
      for (auto &row : d.rows)
        if (is_missing(row[c])) row[c] = fill;
    }
  }
  d.finalize();
  return d;
}

RawDataset load_csv(const std::string &path, const std::string &label,
                    const std::string &positive_label, const LoadOptions &opts) {
  return make_dataset(read_csv(path), label, positive_label, opts);
}

RawDataset select_rows(const RawDataset &data, const std::vector<std::size_t> &idx) {
  RawDataset out;
  out.column_names = data.column_names;
  out.column_kinds = data.column_kinds;
  out.label_column = data.label_column;
  out.positive_label = data.positive_label;
  out.rows.reserve(idx.size());
  for (std::size_t i : idx) out.rows.push_back(data.rows.at(i));
  out.finalize();
  return out;
}

std::vector<std::size_t> PartitionPlan::assignment() const {
  std::size_t n = 0;
  for (const auto &part : parts) n += part.size();
  std::vector<std::size_t> a(n);
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t s : parts[i]) a[s] = i;
  return a;
}

std::vector<std::size_t> PartitionPlan::sizes() const {
  std::vector<std::size_t> s;
  for (const auto &part : parts) s.push_back(part.size());
  return s;
}

namespace {

void check_partition_args(std::size_t n, std::size_t p) {
  if (p < 1) throw UsageError("partition count must be at least 1");
  if (p > n)
    throw UsageError("partition count " + std::to_string(p) + " exceeds sample count " +
                     std::to_string(n));
}

// Contiguous chunks of `order`; the first n % p chunks get one extra sample.
PartitionPlan chunk(const std::vector<std::size_t> &order, std::size_t p) {
  PartitionPlan plan;
  plan.p = p;
  plan.parts.resize(p);
  const std::size_t n = order.size();
  std::size_t pos = 0;
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t size = n / p + (i < n % p ? 1 : 0);
    plan.parts[i].assign(order.begin() + pos, order.begin() + pos + size);
    std::sort(plan.parts[i].begin(), plan.parts[i].end());
    pos += size;
  }
  return plan;
}

}  // namespace

PartitionPlan make_partitions(std::size_t n, std::size_t p, std::uint64_t seed) {
  check_partition_args(n, p);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  return chunk(order, p);
}

PartitionPlan make_stratified_partitions(const Labels &y, std::size_t p,
                                         std::uint64_t seed) {
  const std::size_t n = y.size();
  check_partition_args(n, p);
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < n; ++i) (y[i] ? pos : neg).push_back(i);
  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<std::size_t> dealt = pos;
  dealt.insert(dealt.end(), neg.begin(), neg.end());

  PartitionPlan plan;
  plan.p = p;
  plan.parts.resize(p);
  for (std::size_t i = 0; i < n; ++i) plan.parts[i % p].push_back(dealt[i]);
  for (auto &part : plan.parts) std::sort(part.begin(), part.end());
  return plan;
}

std::size_t auto_partition_count(std::size_t n) {
  constexpr std::size_t max_size = 512;
  constexpr std::size_t min_size = 8;
  if (n < 2 * min_size) return 1;
  std::size_t p = (n + max_size - 1) / max_size;
  while (p > 1 && n / p < min_size) --p;
  return p;
}

Split split_and_fold(std::size_t n, const SplitSpec &spec, std::size_t repetition) {
  if (!(spec.holdout_fraction > 0.0 && spec.holdout_fraction < 1.0))
    throw UsageError("holdout fraction must lie in (0,1)");
  if (spec.folds < 2) throw UsageError("at least 2 folds are required");
  if (n < spec.folds + 1)
    throw DataError("need at least " + std::to_string(spec.folds + 1) + " samples for " +
                    std::to_string(spec.folds) + " folds plus holdout, got " +
                    std::to_string(n));

  std::size_t holdout =
      static_cast<std::size_t>(static_cast<double>(n) * spec.holdout_fraction + 0.5);
  holdout = std::clamp<std::size_t>(holdout, 1, n - spec.folds);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(mix_seed(spec.seed, repetition));
  rng.shuffle(order);

  Split s;
  s.holdout.assign(order.begin(), order.begin() + holdout);
  s.pool.assign(order.begin() + holdout, order.end());
  std::sort(s.holdout.begin(), s.holdout.end());

  const std::size_t m = s.pool.size();
  const std::size_t f = spec.folds;
  std::size_t pos = 0;
  std::vector<std::vector<std::size_t>> chunks(f);
  for (std::size_t i = 0; i < f; ++i) {
    const std::size_t size = m / f + (i < m % f ? 1 : 0);
    chunks[i].assign(s.pool.begin() + pos, s.pool.begin() + pos + size);
    pos += size;
  }
  for (std::size_t i = 0; i < f; ++i) {
    Fold fold;
    fold.validation = chunks[i];
    for (std::size_t j = 0; j < f; ++j)
      if (j != i) fold.train.insert(fold.train.end(), chunks[j].begin(), chunks[j].end());
    std::sort(fold.validation.begin(), fold.validation.end());
    std::sort(fold.train.begin(), fold.train.end());
    s.folds.push_back(std::move(fold));
  }
  std::sort(s.pool.begin(), s.pool.end());
  return s;
}

void dump_split(const Split &split, const std::string &dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string &name, const std::vector<std::size_t> &idx) {
    std::ofstream out(std::filesystem::path(dir) / name);
    if (!out) throw DataError("cannot write " + name + " under " + dir);
    for (std::size_t i : idx) out << i << '\n';
  };
  write("holdout.txt", split.holdout);
  for (std::size_t i = 0; i < split.folds.size(); ++i) {
    write("fold" + std::to_string(i) + "_train.txt", split.folds[i].train);
    write("fold" + std::to_string(i) + "_validation.txt", split.folds[i].validation);
  }
}

}  // namespace imli
