#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace roiml::corpus {

enum class LinkKind { DependsOn, Blocks, RelatesTo, Other };

struct Link {
  LinkKind kind;
  std::string target;

  friend bool operator==(const Link&, const Link&) = default;
};

struct RequirementRecord {
  std::string id;
  std::string text;  // output of clean_text
  std::vector<Link> links;
};

/// Records with unique ids, in input order.
struct RequirementSet {
  std::vector<RequirementRecord> records;
  std::string source_label;

  const RequirementRecord* find(std::string_view id) const;
};

enum class DependencyKind { None, Requires, RelatesTo };

std::string_view to_string(DependencyKind kind);
DependencyKind dependency_kind_from_string(std::string_view name);

/// Binary RDC label. DEPENDENT exactly when kind != None.
struct DependencyLabel {
  DependencyKind kind = DependencyKind::None;

  bool dependent() const { return kind != DependencyKind::None; }
  int value() const { return dependent() ? 1 : 0; }
};

/// Separates the two descriptions in RequirementPair::combined_text.
inline constexpr std::string_view kPairSeparator = "[SEP]";

struct RequirementPair {
  std::string left;
  std::string right;
  DependencyLabel label;
  std::string combined_text;
};

struct PairCorpus {
  std::vector<RequirementPair> pairs;  // positives first, then negatives
  std::size_t positives_count = 0;
  std::size_t negatives_count = 0;

  std::size_t size() const { return pairs.size(); }
};

/// Train pool and test set as indices into PairCorpus::pairs. The train pool
/// keeps the seeded shuffle order it was drawn in; the test set is sorted.
struct SplitPlan {
  std::vector<std::size_t> train_pool;
  std::vector<std::size_t> test_set;
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
};

/// Column names in the issue export. Empty link names mean "not exported".
/// Several description columns are joined with a space (e.g. Title + Description).
struct ExportSchema {
  std::string id = "ID";
  std::vector<std::string> description = {"Title"};
  std::string depends_on = "Depends_on";
  std::string blocks = "Blocks";
  std::string relates;
  std::string other;
};

struct ParseResult {
  RequirementSet set;
  std::size_t skipped_empty_description = 0;
  std::size_t skipped_empty_id = 0;
};

ParseResult parse_issue_export(std::string_view raw_csv, const ExportSchema& schema,
                               std::string source_label = {});

/// Lowercases ASCII letters, turns every other byte into a space, collapses runs
/// of spaces and trims. Idempotent.
std::string clean_text(std::string_view raw);

std::size_t word_count(std::string_view cleaned);

struct FilterResult {
  RequirementSet set;
  std::size_t removed = 0;
};

FilterResult filter_short(const RequirementSet& set, std::size_t min_words = 3);

struct ExtractResult {
  std::vector<RequirementPair> pairs;  // sorted by (left, right)
  std::size_t dangling = 0;            // links whose target is not in the set
};

/// REQUIRES: "X depends_on Y" and "Y blocks X" both yield (X, Y).
/// RELATES_TO: each relates link yields (min id, max id).
ExtractResult extract_positive_pairs(const RequirementSet& set, DependencyKind kind);

/// Samples `count` distinct unordered pairs with no link of any kind between
/// them and not among `positives`. Pairs are stored as (min id, max id).
std::vector<RequirementPair> generate_negative_pairs(const RequirementSet& set,
                                                     const std::vector<RequirementPair>& positives,
                                                     std::size_t count, std::uint64_t seed);

/// Number of eligible negative pairs, i.e. the capacity of generate_negative_pairs.
std::uint64_t negative_pool_size(const RequirementSet& set,
                                 const std::vector<RequirementPair>& positives);

/// Balances the classes by truncating a seeded shuffle of `negatives`.
PairCorpus build_corpus(std::vector<RequirementPair> positives,
                        std::vector<RequirementPair> negatives, std::uint64_t seed);

/// Stratified split; test size is round-half-up(N * test_fraction).
SplitPlan split(const PairCorpus& corpus, double test_fraction, std::uint64_t seed);

/// Nested stratified training subsets, one per fraction of the whole corpus.
/// Each returned list is sorted ascending.
std::vector<std::vector<std::size_t>> fraction_schedule(const PairCorpus& corpus,
                                                        const SplitPlan& plan,
                                                        const std::vector<double>& fractions);

/// 0.05, 0.10, ..., 0.80
std::vector<double> default_fractions();

std::size_t round_half_up(double x);

// Serialisation -------------------------------------------------------------

/// pair_id,left_id,right_id,label,kind,combined_text. pair_id is the index.
std::string write_corpus_csv(const PairCorpus& corpus);
PairCorpus read_corpus_csv(std::string_view text);

/// id,text,depends_on,blocks,relates,other with links joined by ';'.
std::string write_requirements_csv(const RequirementSet& set);

/// pair_index,role (train|test) in plan order.
std::string write_split_csv(const SplitPlan& plan);

/// fraction,pair_index
std::string write_schedule_csv(const std::vector<double>& fractions,
                               const std::vector<std::vector<std::size_t>>& schedule);

/// Sidecar with seed, fractions and counts.
std::string write_split_json(const PairCorpus& corpus, const SplitPlan& plan,
                             const std::vector<double>& fractions,
                             const std::vector<std::vector<std::size_t>>& schedule);

}  // namespace roiml::corpus
