#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace citefair {

using Symbol = std::uint32_t;

/// Interns opaque tokens (citing paper ids, journal ids) used by citation
/// events. Symbols are dense and assigned in first-seen order.
class SymbolTable {
 public:
  Symbol intern(std::string_view token);
  [[nodiscard]] std::optional<Symbol> find(std::string_view token) const;
  [[nodiscard]] const std::string& name(Symbol s) const { return names_[s]; }
  [[nodiscard]] std::size_t size() const noexcept { return names_.size(); }
  void reserve(std::size_t n);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Symbol> index_;
};

struct JournalRecord {
  std::string journal_id;
  std::string title;
  std::string cluster_id;

  bool operator==(const JournalRecord&) const = default;
};

struct Cluster {
  std::string cluster_id;
  std::string name;
  std::size_t size = 0;  // declared member count

  bool operator==(const Cluster&) const = default;
};

struct PublicationCount {
  std::string journal_id;
  int year = 0;
  std::int64_t citable_items = 0;

  bool operator==(const PublicationCount&) const = default;
};

/// One reference occurrence: a citing paper cites an item of a journal.
/// n_refs is the length of the citing paper's full reference list.
struct CitationEvent {
  Symbol citing_paper = 0;
  Symbol citing_journal = 0;
  int citing_year = 0;
  Symbol cited_journal = 0;
  int cited_year = 0;
  int n_refs = 1;
};

struct Dataset {
  std::vector<JournalRecord> journals;
  std::vector<Cluster> clusters;
  std::vector<PublicationCount> publications;
  SymbolTable symbols;
  std::vector<CitationEvent> events;
  int census_year = 0;
};

/// Compares datasets by content: events are compared through their resolved
/// tokens, so two datasets with differently numbered symbol tables can match.
[[nodiscard]] bool same_content(const Dataset& a, const Dataset& b);

struct Violation {
  std::string rule;
  std::string record;
  std::string message;
};

/// Checks every structural invariant of a dataset. Pure; an empty result
/// means the dataset is well formed.
[[nodiscard]] std::vector<Violation> validate(const Dataset& dataset);

/// Journal-to-cluster membership. Cluster order follows the dataset.
class Partition {
 public:
  Partition() = default;
  Partition(std::vector<Cluster> clusters, const std::vector<JournalRecord>& journals);

  [[nodiscard]] static Partition from_dataset(const Dataset& dataset);

  [[nodiscard]] const std::vector<Cluster>& clusters() const noexcept { return clusters_; }
  [[nodiscard]] std::optional<std::size_t> cluster_of(const std::string& journal_id) const;
  [[nodiscard]] std::size_t journal_count() const noexcept { return membership_.size(); }

 private:
  std::vector<Cluster> clusters_;
  std::unordered_map<std::string, std::size_t> membership_;
};

// Indicator tables ---------------------------------------------------------

enum class IndicatorKind { impact_factor, total_cites, cp_ratio, numerator_only, external };
enum class Window { all_prior = 0, two = 2, five = 5 };
enum class Counting { integer, fractional };
enum class Normalization { raw, rescaled };

[[nodiscard]] std::string_view to_string(IndicatorKind k);
[[nodiscard]] std::string_view to_string(Window w);
[[nodiscard]] std::string_view to_string(Counting c);
[[nodiscard]] std::string_view to_string(Normalization n);
[[nodiscard]] std::optional<IndicatorKind> parse_kind(std::string_view s);
[[nodiscard]] std::optional<Window> parse_window(std::string_view s);
[[nodiscard]] std::optional<Counting> parse_counting(std::string_view s);
[[nodiscard]] std::optional<Normalization> parse_normalization(std::string_view s);

struct IndicatorEntry {
  std::string journal_id;
  std::optional<double> value;  // nullopt = UNDEFINED (zero denominator)

  bool operator==(const IndicatorEntry&) const = default;
};

/// Mean used when rescaling one cluster, and how many DEFINED values fed it.
struct ClusterMean {
  std::string cluster_id;
  double mean = 0.0;
  std::size_t defined_count = 0;

  bool operator==(const ClusterMean&) const = default;
};

struct IndicatorTable {
  std::string indicator_id;
  IndicatorKind kind = IndicatorKind::external;
  Window window = Window::all_prior;
  Counting counting = Counting::integer;
  Normalization normalization = Normalization::raw;
  int census_year = 0;
  std::string source_id;                // raw table id for rescaled tables
  std::vector<ClusterMean> cluster_means;  // filled by rescale
  std::vector<IndicatorEntry> entries;

  [[nodiscard]] std::size_t defined_count() const;
};

}  // namespace citefair
