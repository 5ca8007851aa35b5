#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "citefair/model.hpp"

namespace citefair {

enum class UnknownCitedPolicy { drop, error };
enum class ZeroRefsPolicy { drop_with_warning, error };

struct IngestConfig {
  std::size_t min_cluster_size = 10;
  UnknownCitedPolicy unknown_cited = UnknownCitedPolicy::drop;
  ZeroRefsPolicy zero_refs = ZeroRefsPolicy::drop_with_warning;
  char delimiter = '\t';
  /// Evaluation year; defaults to the latest citing year in the events.
  std::optional<int> census_year;
};

struct JournalFile {
  std::vector<JournalRecord> journals;
  std::vector<Cluster> clusters;  // first-appearance order, size = row count
};

struct CitationFile {
  SymbolTable symbols;
  std::vector<CitationEvent> events;
  std::size_t dropped_zero_refs = 0;
  std::vector<std::string> warnings;
};

/// Columns: journal_id, title, cluster_id, cluster_name.
[[nodiscard]] JournalFile parse_journals(const std::filesystem::path& path, char delimiter = '\t');

/// Columns: journal_id, year, citable_items.
[[nodiscard]] std::vector<PublicationCount> parse_publications(const std::filesystem::path& path,
                                                               char delimiter = '\t');

/// Columns: citing_paper_id, citing_journal_id, citing_year, cited_journal_id,
/// cited_year, n_refs. Rows with n_refs = 0 follow config.zero_refs.
[[nodiscard]] CitationFile parse_citations(const std::filesystem::path& path, const IngestConfig& config);

struct ExclusionSummary {
  std::vector<Cluster> excluded_clusters;
  std::size_t excluded_journals = 0;
  std::size_t events_dropped_excluded = 0;
  std::size_t events_dropped_unknown_cited = 0;
  std::size_t events_dropped_zero_refs = 0;
  std::size_t publications_dropped = 0;
  std::vector<std::string> warnings;
};

struct Assembled {
  Dataset dataset;
  ExclusionSummary summary;
};

/// Joins the parsed files into a validated Dataset. Clusters smaller than
/// min_cluster_size are removed together with their journals and every event
/// citing or cited by them. Throws ValidationError when the result breaks an
/// invariant and Error when it is empty.
[[nodiscard]] Assembled assemble(JournalFile journals, std::vector<PublicationCount> publications,
                                 CitationFile citations, const IngestConfig& config);

struct InputPaths {
  std::filesystem::path journals;
  std::filesystem::path publications;
  std::filesystem::path citations;

  [[nodiscard]] static InputPaths in_directory(const std::filesystem::path& dir);
};

/// Parses the three files concurrently, then assembles.
[[nodiscard]] Assembled ingest_files(const InputPaths& paths, const IngestConfig& config);

/// Writes the canonical bundle: journals.tsv, publications.tsv, citations.tsv
/// and a dataset.json manifest carrying the census year.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

/// Reads a bundle written by write_dataset.
[[nodiscard]] Dataset read_dataset(const std::filesystem::path& dir);

void write_exclusion_summary(const ExclusionSummary& summary, const std::filesystem::path& path);

}  // namespace citefair
