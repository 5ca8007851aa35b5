#include "citefair/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>
#include <utility>

#include <fmt/format.h>

#include "citefair/error.hpp"

namespace citefair {

Symbol SymbolTable::intern(std::string_view token) {
  auto [it, inserted] = index_.try_emplace(std::string(token), static_cast<Symbol>(names_.size()));
  if (inserted) names_.emplace_back(token);
  return it->second;
}

std::optional<Symbol> SymbolTable::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void SymbolTable::reserve(std::size_t n) {
  names_.reserve(n);
  index_.reserve(n);
}

bool same_content(const Dataset& a, const Dataset& b) {
  if (a.census_year != b.census_year || a.journals != b.journals || a.clusters != b.clusters ||
      a.publications != b.publications || a.events.size() != b.events.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    const auto& x = a.events[i];
    const auto& y = b.events[i];
    if (x.citing_year != y.citing_year || x.cited_year != y.cited_year || x.n_refs != y.n_refs ||
        a.symbols.name(x.citing_paper) != b.symbols.name(y.citing_paper) ||
        a.symbols.name(x.citing_journal) != b.symbols.name(y.citing_journal) ||
        a.symbols.name(x.cited_journal) != b.symbols.name(y.cited_journal)) {
      return false;
    }
  }
  return true;
}

namespace {

std::string event_label(const Dataset& d, std::size_t i) {
  const auto& e = d.events[i];
  if (e.citing_paper < d.symbols.size()) {
    return fmt::format("event #{} (paper {})", i, d.symbols.name(e.citing_paper));
  }
  return fmt::format("event #{}", i);
}

}  // namespace

std::vector<Violation> validate(const Dataset& d) {
  std::vector<Violation> out;

  std::map<std::string, std::size_t> declared;
  for (const auto& c : d.clusters) {
    if (!declared.emplace(c.cluster_id, c.size).second) {
      out.push_back({"duplicate_cluster_id", c.cluster_id, "cluster id declared more than once"});
    }
    if (c.size < 1) {
      out.push_back({"empty_cluster", c.cluster_id, "cluster declares no member journals"});
    }
  }

  std::set<std::string> seen_journals;
  std::set<std::string> reported;
  std::map<std::string, std::size_t> membership;
  for (const auto& j : d.journals) {
    if (!seen_journals.insert(j.journal_id).second && reported.insert(j.journal_id).second) {
      out.push_back({"duplicate_journal_id", j.journal_id, "journal id occurs more than once"});
    }
    if (!declared.contains(j.cluster_id)) {
      out.push_back({"unknown_cluster", j.journal_id,
                     fmt::format("cluster '{}' is not declared", j.cluster_id)});
    } else {
      ++membership[j.cluster_id];
    }
  }
  for (const auto& c : d.clusters) {
    const std::size_t actual = membership.contains(c.cluster_id) ? membership[c.cluster_id] : 0;
    if (actual != c.size) {
      out.push_back({"cluster_size_mismatch", c.cluster_id,
                     fmt::format("declared {} journals, membership has {}", c.size, actual)});
    }
  }

  std::set<std::pair<std::string, int>> pub_keys;
  for (const auto& p : d.publications) {
    const std::string label = fmt::format("{}/{}", p.journal_id, p.year);
    if (!pub_keys.emplace(p.journal_id, p.year).second) {
      out.push_back({"duplicate_publication", label, "more than one record for journal and year"});
    }
    if (p.citable_items < 0) {
      out.push_back({"negative_citable_items", label, "citable item count is negative"});
    }
  }

  struct PaperInfo {
    Symbol journal;
    int year;
    int n_refs;
    bool reported;
  };
  std::unordered_map<Symbol, PaperInfo> papers;
  std::unordered_set<Symbol> resolvable;
  for (const auto& j : d.journals) {
    if (auto s = d.symbols.find(j.journal_id)) resolvable.insert(*s);
  }
  const std::size_t nsym = d.symbols.size();
  for (std::size_t i = 0; i < d.events.size(); ++i) {
    const auto& e = d.events[i];
    if (e.citing_paper >= nsym || e.citing_journal >= nsym || e.cited_journal >= nsym) {
      out.push_back({"dangling_symbol", fmt::format("event #{}", i), "token index out of range"});
      continue;
    }
    if (e.n_refs < 1) {
      out.push_back({"nonpositive_n_refs", event_label(d, i), "reference list length must be >= 1"});
    }
    if (e.cited_year > e.citing_year) {
      out.push_back({"cited_after_citing", event_label(d, i),
                     fmt::format("cited year {} is after citing year {}", e.cited_year, e.citing_year)});
    }
    if (!resolvable.contains(e.cited_journal)) {
      out.push_back({"unresolved_cited_journal", event_label(d, i),
                     fmt::format("cited journal '{}' is not in the journal list",
                                 d.symbols.name(e.cited_journal))});
    }
    auto [it, inserted] =
        papers.try_emplace(e.citing_paper, PaperInfo{e.citing_journal, e.citing_year, e.n_refs, false});
    if (!inserted && !it->second.reported &&
        (it->second.journal != e.citing_journal || it->second.year != e.citing_year ||
         it->second.n_refs != e.n_refs)) {
      it->second.reported = true;
      out.push_back({"inconsistent_citing_paper", d.symbols.name(e.citing_paper),
                     "events of one citing paper disagree on journal, year or n_refs"});
    }
  }
  return out;
}

Partition::Partition(std::vector<Cluster> clusters, const std::vector<JournalRecord>& journals)
    : clusters_(std::move(clusters)) {
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < clusters_.size(); ++i) by_id.emplace(clusters_[i].cluster_id, i);
  membership_.reserve(journals.size());
  for (const auto& j : journals) {
    auto it = by_id.find(j.cluster_id);
    if (it == by_id.end()) {
      throw Error(fmt::format("journal '{}' refers to undeclared cluster '{}'", j.journal_id, j.cluster_id));
    }
    membership_.emplace(j.journal_id, it->second);
  }
}

Partition Partition::from_dataset(const Dataset& dataset) {
  return Partition(dataset.clusters, dataset.journals);
}

std::optional<std::size_t> Partition::cluster_of(const std::string& journal_id) const {
  auto it = membership_.find(journal_id);
  if (it == membership_.end()) return std::nullopt;
  return it->second;
}

std::string_view to_string(IndicatorKind k) {
  switch (k) {
    case IndicatorKind::impact_factor: return "impact_factor";
    case IndicatorKind::total_cites: return "total_cites";
    case IndicatorKind::cp_ratio: return "cp_ratio";
    case IndicatorKind::numerator_only: return "numerator_only";
    case IndicatorKind::external: return "external";
  }
  return "external";
}

std::string_view to_string(Window w) {
  switch (w) {
    case Window::two: return "2";
    case Window::five: return "5";
    case Window::all_prior: return "all";
  }
  return "all";
}

std::string_view to_string(Counting c) {
  return c == Counting::integer ? "integer" : "fractional";
}

std::string_view to_string(Normalization n) {
  return n == Normalization::raw ? "raw" : "rescaled";
}

std::optional<IndicatorKind> parse_kind(std::string_view s) {
  for (auto k : {IndicatorKind::impact_factor, IndicatorKind::total_cites, IndicatorKind::cp_ratio,
                 IndicatorKind::numerator_only, IndicatorKind::external}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<Window> parse_window(std::string_view s) {
  if (s == "2") return Window::two;
  if (s == "5") return Window::five;
  if (s == "all") return Window::all_prior;
  return std::nullopt;
}

std::optional<Counting> parse_counting(std::string_view s) {
  if (s == "integer") return Counting::integer;
  if (s == "fractional") return Counting::fractional;
  return std::nullopt;
}

std::optional<Normalization> parse_normalization(std::string_view s) {
  if (s == "raw") return Normalization::raw;
  if (s == "rescaled") return Normalization::rescaled;
  return std::nullopt;
}

std::size_t IndicatorTable::defined_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.value.has_value(); }));
}

ParseError::ParseError(std::string file, std::size_t line, const std::string& message)
    : Error(fmt::format("{}:{}: {}", file, line, message)), file_(std::move(file)), line_(line) {}

namespace {

std::string summarize(const std::vector<Violation>& v) {
  if (v.empty()) return "validation failed";
  std::string msg = fmt::format("{} validation error(s); first: [{}] {}: {}", v.size(), v.front().rule,
                                v.front().record, v.front().message);
  return msg;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(summarize(violations)), violations_(std::move(violations)) {}

}  // namespace citefair
