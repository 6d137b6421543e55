#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imli/common.hpp"

namespace imli {

enum class ColumnKind { binary, categorical, continuous };

const char *to_string(ColumnKind kind);

// Header plus raw text cells, as read from a CSV file.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column_index(const std::string &name) const;
};

// RFC-4180 reader: quoted fields, doubled quotes, embedded separators and
// newlines.  Throws DataError on ragged rows.
Table parse_csv(const std::string &text);
Table read_csv(const std::string &path);

struct LoadOptions {
  bool impute = false;
  // Collapse every non-positive label value into the negative class.  When
  // false, more than two distinct label values is an error.
  bool one_vs_rest = true;
};

class RawDataset {
 public:
  std::vector<std::string> column_names;
  std::vector<ColumnKind> column_kinds;
  // Cells are kept as text; numeric columns also have a parsed copy.
  std::vector<std::vector<std::string>> rows;
  std::size_t label_column = 0;
  std::string positive_label;

  std::size_t num_rows() const { return rows.size(); }
  std::size_t num_columns() const { return column_names.size(); }

  // Column indices other than the label column, in file order.
  std::vector<std::size_t> feature_columns() const;

  Labels labels() const;
  double numeric(std::size_t row, std::size_t col) const { return numbers_[col][row]; }
  const std::vector<double> &numeric_column(std::size_t col) const { return numbers_[col]; }

  // Fills kind inference and numeric caches; validates invariants.
  void finalize();

 private:
  std::vector<std::vector<double>> numbers_;
};

bool is_missing(const std::string &cell);
std::optional<double> parse_number(const std::string &cell);

RawDataset make_dataset(Table table, const std::string &label,
                        const std::string &positive_label,
                        const LoadOptions &opts = {});
RawDataset load_csv(const std::string &path, const std::string &label,
                    const std::string &positive_label,
                    const LoadOptions &opts = {});

// Subset of rows, keeping column typing from the parent.
RawDataset select_rows(const RawDataset &data, const std::vector<std::size_t> &idx);

struct PartitionPlan {
  std::size_t p = 0;
  // parts[i] holds the sample indices of partition i+1, ascending.
  std::vector<std::vector<std::size_t>> parts;

  // 0-based partition id for every sample.
  std::vector<std::size_t> assignment() const;
  std::vector<std::size_t> sizes() const;
};

PartitionPlan make_partitions(std::size_t n, std::size_t p, std::uint64_t seed);

// Same size law, but positives and negatives are dealt round-robin so each
// partition sees the class ratio of the whole set.
PartitionPlan make_stratified_partitions(const Labels &y, std::size_t p,
                                         std::uint64_t seed);

// Smallest p with partitions of at most 512 samples, never below 8 samples
// per partition (p = 1 for tiny sets).
std::size_t auto_partition_count(std::size_t n);

struct SplitSpec {
  double holdout_fraction = 0.1;
  std::size_t folds = 10;
  std::size_t repetitions = 1;
  std::uint64_t seed = 42;
};

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

struct Split {
  std::vector<std::size_t> holdout;
  std::vector<std::size_t> pool;
  std::vector<Fold> folds;
};

// One repetition; distinct repetitions draw distinct holdout sets.
Split split_and_fold(std::size_t n, const SplitSpec &spec, std::size_t repetition = 0);

// Writes holdout.txt, fold<i>_train.txt, fold<i>_validation.txt under dir.
void dump_split(const Split &split, const std::string &dir);

}  // namespace imli
