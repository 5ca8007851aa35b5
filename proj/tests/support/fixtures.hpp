#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "citefair/model.hpp"

namespace citefair::testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("citefair-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Small hand-built datasets. Cluster sizes follow membership on build().
class DatasetBuilder {
 public:
  explicit DatasetBuilder(int census_year = 2010) { ds_.census_year = census_year; }

  DatasetBuilder& cluster(const std::string& id, const std::string& name = "") {
    ds_.clusters.push_back({id, name.empty() ? id : name, 0});
    return *this;
  }
  DatasetBuilder& journal(const std::string& id, const std::string& cluster_id) {
    ds_.journals.push_back({id, "Journal " + id, cluster_id});
    return *this;
  }
  DatasetBuilder& items(const std::string& journal_id, int year, std::int64_t n) {
    ds_.publications.push_back({journal_id, year, n});
    return *this;
  }
  DatasetBuilder& cite(const std::string& paper, const std::string& citing_journal, int citing_year,
                       const std::string& cited_journal, int cited_year, int n_refs) {
    CitationEvent e;
    e.citing_paper = ds_.symbols.intern(paper);
    e.citing_journal = ds_.symbols.intern(citing_journal);
    e.citing_year = citing_year;
    e.cited_journal = ds_.symbols.intern(cited_journal);
    e.cited_year = cited_year;
    e.n_refs = n_refs;
    ds_.events.push_back(e);
    return *this;
  }

  [[nodiscard]] Dataset build() const {
    Dataset out;
    out.census_year = ds_.census_year;
    out.journals = ds_.journals;
    out.clusters = ds_.clusters;
    out.publications = ds_.publications;
    out.events = ds_.events;
    for (std::size_t s = 0; s < ds_.symbols.size(); ++s) out.symbols.intern(ds_.symbols.name(static_cast<Symbol>(s)));
    for (auto& c : out.clusters) {
      c.size = 0;
      for (const auto& j : out.journals) c.size += j.cluster_id == c.cluster_id ? 1 : 0;
    }
    return out;
  }

 private:
  Dataset ds_;
};

inline IndicatorTable make_table(const std::string& id,
                                 std::initializer_list<std::pair<std::string, std::optional<double>>> values) {
  IndicatorTable t;
  t.indicator_id = id;
  for (const auto& [j, v] : values) t.entries.push_back({j, v});
  return t;
}

/// Partition where journal ids are assigned to clusters by the map.
inline Partition make_partition(const std::vector<std::pair<std::string, std::string>>& journal_to_cluster) {
  std::vector<Cluster> clusters;
  std::vector<JournalRecord> journals;
  std::map<std::string, std::size_t> index;
  for (const auto& [j, c] : journal_to_cluster) {
    auto [it, inserted] = index.try_emplace(c, clusters.size());
    if (inserted) clusters.push_back({c, c, 0});
    ++clusters[it->second].size;
    journals.push_back({j, "", c});
  }
  return Partition(std::move(clusters), journals);
}

}  // namespace citefair::testing
