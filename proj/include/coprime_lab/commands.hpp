#pragma once

// Command implementations behind the coprime_lab executable. Each command
// writes JSON lines (or CSV) to an ostream and returns the process exit code;
// argument parsing lives in the tool itself.
//
// Needs nlohmann/json (vendor/json.hpp).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "coprime_lab/calibration.hpp"
#include "coprime_lab/constants.hpp"
#include "coprime_lab/constraint.hpp"
#include "coprime_lab/counting.hpp"
#include "coprime_lab/discrepancy.hpp"
#include "coprime_lab/error.hpp"
#include "coprime_lab/montecarlo.hpp"
#include "json.hpp"

namespace coprime_lab {

enum ExitCode : int { exit_ok = 0, exit_fail = 1, exit_invalid = 2, exit_unsupported = 3, exit_capacity = 4 };

// Maps the library's exceptions onto exit codes, printing the message.
template <class F>
int run_guarded(F&& body, std::ostream& err = std::cerr) {
  try {
    return body();
  } catch (const unsupported_formula& e) {
    err << "unsupported: " << e.what() << '\n';
    return exit_unsupported;
  } catch (const capacity_error& e) {
    err << "capacity: " << e.what() << '\n';
    return exit_capacity;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_invalid;
  }
}

namespace io {

using json = nlohmann::ordered_json;

// 15 significant digits, so that output is stable across platforms.
inline double round15(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

inline std::string fmt15(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline json count_json(uint128 v) {
  if (v <= std::numeric_limits<std::uint64_t>::max()) return json(static_cast<std::uint64_t>(v));
  return json(to_string(v));
}

inline std::vector<std::uint64_t> parse_u64_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw invalid_argument("empty item in list '" + s + "'");
    item = item.substr(b, e - b + 1);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item[0] == '-') throw invalid_argument("not a non-negative integer: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

inline std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw invalid_argument("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace io

// Textual description of a constraint as given on the command line or in a
// campaign stanza. Lists shorter than r are padded with 1 (moduli) or 0
// (residues).
struct ConstraintArgs {
  std::string cls = "mutual";
  int r = 2;
  int k = 0;
  std::string coprime_to;
  std::string divisible;
  std::string modulus;
  std::string residue;
  std::string groups;
  std::string group_moduli;

  TupleConstraint build() const {
    CoprimalityClass c;
    if (cls == "mutual") {
      c = CoprimalityClass::mutual();
    } else if (cls == "pairwise") {
      c = CoprimalityClass::pairwise();
    } else if (cls == "kwise") {
      c = CoprimalityClass::kwise(k);
    } else {
      throw invalid_argument("unknown class '" + cls + "' (expected mutual, pairwise or kwise)");
    }
    if (r < 2 || r > 64) throw invalid_argument("tuple length r must be in [2, 64]");
    const auto ru = static_cast<std::size_t>(r);
    const auto padded = [&](const std::string& s, std::uint64_t fill, const char* what) {
      auto v = io::parse_u64_list(s);
      if (v.size() > ru) throw invalid_argument(std::string(what) + " list longer than r");
      v.resize(ru, fill);
      return v;
    };
    const int kinds = !coprime_to.empty() + !divisible.empty() + !modulus.empty();
    if (kinds > 1) throw invalid_argument("give at most one of coprime-to, divisible, modulus/residue");
    if (!residue.empty() && modulus.empty()) throw invalid_argument("residue needs modulus");

    std::vector<SideCondition> sides(ru);
    if (!coprime_to.empty()) {
      const auto a = padded(coprime_to, 1, "coprime-to");
      for (std::size_t j = 0; j < ru; ++j) sides[j] = a[j] == 1 ? SideCondition::none() : SideCondition::coprime_to(a[j]);
    } else if (!divisible.empty()) {
      const auto a = padded(divisible, 1, "divisible");
      for (std::size_t j = 0; j < ru; ++j) sides[j] = a[j] == 1 ? SideCondition::none() : SideCondition::divisible_by(a[j]);
    } else if (!modulus.empty()) {
      const auto a = padded(modulus, 1, "modulus");
      const auto b = padded(residue, 0, "residue");
      for (std::size_t j = 0; j < ru; ++j) {
        if (a[j] == 0) throw invalid_argument("modulus must be >= 1");
        sides[j] = a[j] == 1 ? SideCondition::none() : SideCondition::residue_mod(a[j], b[j]);
      }
    }

    std::optional<Grouping> grouping;
    if (!groups.empty() || !group_moduli.empty()) {
      if (groups.empty() || group_moduli.empty()) throw invalid_argument("grouping needs both groups and group moduli");
      Grouping g;
      for (const auto b : io::parse_u64_list(groups)) g.block_of.push_back(static_cast<int>(b));
      g.moduli = io::parse_u64_list(group_moduli);
      grouping = std::move(g);
      return TupleConstraint::make(r, c, {}, grouping);
    }
    return TupleConstraint::make(r, c, sides);
  }
};

// ---------------------------------------------------------------------------
// constant

inline io::json constant_json(const TupleConstraint& c, std::uint64_t cutoff) {
  const auto f = density_factor(c);
  const Interval iv = scale(class_constant(c, cutoff), f.factor);
  io::json j;
  j["constraint"] = c.describe();
  j["formula"] = to_string(f.formula);
  j["factor"] = f.factor.str();
  j["cutoff"] = cutoff;
  j["lo"] = io::round15(iv.lo);
  j["hi"] = io::round15(iv.hi);
  j["midpoint"] = io::round15(iv.midpoint());
  j["width"] = io::round15(iv.width());
  return j;
}

inline int cmd_constant(const ConstraintArgs& args, std::uint64_t cutoff, std::ostream& out) {
  out << constant_json(args.build(), cutoff).dump() << '\n';
  return exit_ok;
}

// ---------------------------------------------------------------------------
// count

namespace detail {

// Pairwise with no conditions, or with one shared coprime-to modulus: the
// Toth recursion applies.
inline std::optional<std::uint64_t> toth_modulus(const TupleConstraint& c) {
  if (c.effective_k() != 2) return std::nullopt;
  if (!c.has_conditions()) return 1;
  if (const auto& g = c.grouping(); g && g->moduli.size() == 1) return g->moduli[0];
  return std::nullopt;
}

}  // namespace detail

inline CountResult count_auto(const Box& box, const TupleConstraint& c, const ArithTables& tables) {
  if (c.effective_k() == c.r()) return count_mutual_mobius(box, c, tables);
  if (const auto u = detail::toth_modulus(c)) {
    auto res = count_toth(box.bounds, *u, tables);
    return {res.count, c, box, CountMethod::toth};
  }
  return count_kwise_mobius(box, c, tables);
}

inline int cmd_count(const ConstraintArgs& args, std::uint64_t n, const std::string& alpha, const std::string& method,
                     std::ostream& out) {
  const TupleConstraint c = args.build();
  Box box = Box::cube(n, c.r());
  if (!alpha.empty()) {
    const auto a = io::parse_double_list(alpha);
    if (static_cast<int>(a.size()) != c.r()) throw invalid_argument("alpha needs r components");
    box = Box::from_alpha(n, a);
  }
  const auto tables_for = [&]() { return ArithTables(std::max<std::uint64_t>(2, box.max_bound())); };
  CountResult res{0, c, box, CountMethod::brute_force};
  if (method == "auto") {
    res = count_auto(box, c, tables_for());
  } else if (method == "brute_force") {
    res = count_box_bruteforce(box, c);
  } else if (method == "mobius") {
    const auto t = tables_for();
    res = c.effective_k() == c.r() ? count_mutual_mobius(box, c, t) : count_kwise_mobius(box, c, t);
  } else if (method == "toth") {
    const auto u = detail::toth_modulus(c);
    if (!u) throw unsupported_formula("toth counts pairwise tuples with at most one shared coprime-to modulus");
    res = count_toth(box.bounds, *u, tables_for());
    res.constraint = c;
  } else if (method == "prefix_grid") {
    res = count_prefix_grid(build_grid(n, c), box, c);
  } else {
    throw invalid_argument("unknown method '" + method + "'");
  }
  io::json j;
  j["count"] = io::count_json(res.count);
  j["method"] = to_string(res.method);
  j["n"] = n;
  j["bounds"] = box.bounds;
  j["constraint"] = c.describe();
  out << j.dump() << '\n';
  return exit_ok;
}

// ---------------------------------------------------------------------------
// verify

inline constexpr double kDefaultTolerance = 5e-3;
inline constexpr std::uint64_t kDefaultVerifyN = 4096;
inline constexpr std::uint64_t kDefaultMcSamples = 200'000;
inline constexpr std::uint64_t kDefaultMcSeed = 20240601;
inline constexpr std::uint64_t kVerifyTothCalls = 10'000'000;
inline constexpr std::size_t kVerifyMobiusTerms = 4'000'000;

struct CampaignEntry {
  std::string label;
  ConstraintArgs constraint;
  std::optional<std::uint64_t> n;
  std::optional<double> tolerance;
  std::optional<double> override_constant;  // harness self-test: replaces the theoretical value
  bool montecarlo = false;
  int line = 0;
};

inline std::vector<CampaignEntry> parse_campaign(std::istream& in) {
  std::vector<CampaignEntry> entries;
  std::string raw;
  int line_no = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto where = " (line " + std::to_string(line_no) + ")";
    if (line == "[entry]") {
      entries.push_back({});
      entries.back().line = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw invalid_argument("expected 'key = value'" + where);
    if (entries.empty()) throw invalid_argument("key outside an [entry] stanza" + where);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto& e = entries.back();
    try {
      if (key == "label") e.label = value;
      else if (key == "class") e.constraint.cls = value;
      else if (key == "r") e.constraint.r = std::stoi(value);
      else if (key == "k") e.constraint.k = std::stoi(value);
      else if (key == "coprime_to") e.constraint.coprime_to = value;
      else if (key == "divisible") e.constraint.divisible = value;
      else if (key == "modulus") e.constraint.modulus = value;
      else if (key == "residue") e.constraint.residue = value;
      else if (key == "groups") e.constraint.groups = value;
      else if (key == "group_moduli") e.constraint.group_moduli = value;
      else if (key == "n") e.n = std::stoull(value);
      else if (key == "tolerance") e.tolerance = std::stod(value);
      else if (key == "override_constant") e.override_constant = std::stod(value);
      else if (key == "montecarlo") e.montecarlo = value == "true" || value == "1" || value == "yes";
      else throw invalid_argument("unknown key '" + key + "'" + where);
    } catch (const invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw invalid_argument("bad value '" + value + "' for key '" + key + "'" + where);
    }
  }
  return entries;
}

inline std::vector<CampaignEntry> load_campaign(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_argument("cannot open campaign file '" + path + "'");
  return parse_campaign(in);
}

enum class Verdict { pass, fail, unsupported };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::unsupported: return "UNSUPPORTED";
  }
  return "?";
}

struct VerifyRow {
  std::string label;
  std::string constraint;
  std::string formula;
  std::optional<Interval> theoretical;
  std::uint64_t n = 0;
  std::uint64_t n_used = 0;
  uint128 count = 0;
  std::string method;
  double empirical = 0;
  std::optional<McEstimate> montecarlo;
  double tolerance = kDefaultTolerance;
  Verdict verdict = Verdict::unsupported;
};

inline Verdict judge(const std::optional<Interval>& theory, double empirical, double tolerance) {
  if (!theory) return Verdict::unsupported;
  const bool ok = std::fabs(empirical - theory->midpoint()) <= tolerance && theory->width() <= tolerance;
  return ok ? Verdict::pass : Verdict::fail;
}

struct VerifyOptions {
  std::uint64_t n = kDefaultVerifyN;
  double tolerance = kDefaultTolerance;
  std::uint64_t cutoff = kDefaultPrimeCutoff;
  std::uint64_t mc_samples = kDefaultMcSamples;
  std::uint64_t mc_seed = kDefaultMcSeed;
  double confidence = 0.99;
  bool montecarlo_all = false;
};

// Exact counts for verification rows. Counter choice: Möbius when the set is
// the mutual one, the Toth recursion for plain pairwise, the k-subset Möbius
// plan otherwise. On a capacity error the scale is halved.
class VerifyCounter {
 public:
  struct Result {
    uint128 count;
    std::uint64_t n_used;
  };

  Result count(const TupleConstraint& c, std::uint64_t n) {
    for (std::uint64_t m = n; m >= 1; m /= 2) {
      try {
        return {count_at(c, m), m};
      } catch (const capacity_error&) {
        if (m == 1) throw;
      }
    }
    throw capacity_error("no feasible scale");
  }

 private:
  const ArithTables& tables(std::uint64_t n) {
    if (!tables_ || tables_->limit() < n) tables_ = std::make_unique<ArithTables>(std::max<std::uint64_t>(2, n));
    return *tables_;
  }

  uint128 count_at(const TupleConstraint& c, std::uint64_t n) {
    const Box box = Box::cube(n, c.r());
    const auto& t = tables(n);
    if (c.effective_k() == c.r()) return count_mutual_mobius(box, c, t).count;
    if (const auto u = detail::toth_modulus(c)) {
      const auto key = std::make_tuple(c.r(), n, *u);
      if (auto it = toth_cache_.find(key); it != toth_cache_.end()) return it->second;
      const uint128 v = count_toth(box.bounds, *u, t, kVerifyTothCalls).count;
      toth_cache_.emplace(key, v);
      return v;
    }
    const auto key = std::make_tuple(c.r(), n, c.effective_k());
    auto it = plans_.find(key);
    if (it == plans_.end())
      it = plans_.emplace(key, MobiusPlan::build(box.bounds, c.effective_k(), t, kVerifyMobiusTerms)).first;
    return it->second.evaluate(c);
  }

  std::unique_ptr<ArithTables> tables_;
  std::map<std::tuple<int, std::uint64_t, std::uint64_t>, uint128> toth_cache_;
  std::map<std::tuple<int, std::uint64_t, int>, MobiusPlan> plans_;
};

inline CountMethod verify_method(const TupleConstraint& c) {
  if (c.effective_k() == c.r()) return CountMethod::mobius;
  if (detail::toth_modulus(c)) return CountMethod::toth;
  return CountMethod::mobius;
}

inline VerifyRow verify_entry(const CampaignEntry& e, const VerifyOptions& opts, VerifyCounter& counter) {
  const TupleConstraint c = e.constraint.build();
  VerifyRow row;
  row.label = e.label;
  row.constraint = c.describe();
  row.tolerance = e.tolerance.value_or(opts.tolerance);
  row.n = e.n.value_or(opts.n);
  try {
    const auto f = density_factor(c);
    row.formula = to_string(f.formula);
    row.theoretical = scale(class_constant(c, opts.cutoff), f.factor);
  } catch (const unsupported_formula&) {
    row.formula = "none";
  }
  if (e.override_constant && row.theoretical) {
    const double v = *e.override_constant;
    row.theoretical = Interval::make(v, v);
    row.formula = "override";
  }
  const auto res = counter.count(c, row.n);
  row.count = res.count;
  row.n_used = res.n_used;
  row.method = to_string(verify_method(c));
  row.empirical = static_cast<double>(static_cast<long double>(res.count) /
                                      std::pow(static_cast<long double>(res.n_used), c.r()));
  if (!row.theoretical || e.montecarlo || opts.montecarlo_all)
    row.montecarlo = estimate(c, row.n_used, opts.mc_samples, opts.mc_seed, opts.confidence);
  row.verdict = judge(row.theoretical, row.empirical, row.tolerance);
  return row;
}

inline io::json row_json(const VerifyRow& row) {
  io::json j;
  j["label"] = row.label;
  j["constraint"] = row.constraint;
  j["formula"] = row.formula;
  if (row.theoretical) {
    j["theory_lo"] = io::round15(row.theoretical->lo);
    j["theory_hi"] = io::round15(row.theoretical->hi);
    j["theory_mid"] = io::round15(row.theoretical->midpoint());
    j["theory_width"] = io::round15(row.theoretical->width());
  } else {
    j["theory_lo"] = nullptr;
    j["theory_hi"] = nullptr;
    j["theory_mid"] = nullptr;
    j["theory_width"] = nullptr;
  }
  j["n"] = row.n;
  j["n_used"] = row.n_used;
  j["count"] = io::count_json(row.count);
  j["method"] = row.method;
  j["empirical"] = io::round15(row.empirical);
  j["deviation"] = row.theoretical ? io::json(io::round15(std::fabs(row.empirical - row.theoretical->midpoint())))
                                   : io::json(nullptr);
  if (row.montecarlo) {
    j["mc_mean"] = io::round15(row.montecarlo->mean);
    j["mc_half_width"] = io::round15(row.montecarlo->half_width);
    j["mc_samples"] = row.montecarlo->samples;
    j["mc_seed"] = row.montecarlo->seed;
  } else {
    j["mc_mean"] = nullptr;
    j["mc_half_width"] = nullptr;
    j["mc_samples"] = nullptr;
    j["mc_seed"] = nullptr;
  }
  j["tolerance"] = io::round15(row.tolerance);
  j["verdict"] = to_string(row.verdict);
  return j;
}

inline void write_csv(std::ostream& out, const std::vector<io::json>& rows, const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out << ',';
      const auto& v = r.at(columns[i]);
      if (v.is_null()) continue;
      if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"") != std::string::npos) {
          std::string q = "\"";
          for (const char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          s = q + "\"";
        }
        out << s;
      } else if (v.is_number_float()) {
        out << io::fmt15(v.get<double>());
      } else {
        out << v.dump();
      }
    }
    out << '\n';
  }
}

inline void write_rows(std::ostream& out, const std::vector<io::json>& rows, const std::string& format) {
  if (format == "csv") {
    std::vector<std::string> cols;
    if (!rows.empty())
      for (const auto& [k, v] : rows.front().items()) cols.push_back(k);
    write_csv(out, rows, cols);
    return;
  }
  for (const auto& r : rows) out << r.dump() << '\n';
}

// Rows of `verify --suite paper`.
inline std::vector<CampaignEntry> paper_suite() {
  std::vector<CampaignEntry> out;
  const auto add = [&](std::string label, ConstraintArgs a) {
    CampaignEntry e;
    e.label = std::move(label);
    e.constraint = std::move(a);
    out.push_back(std::move(e));
  };
  const auto base = [](const std::string& cls, int r, int k = 0) {
    ConstraintArgs a;
    a.cls = cls;
    a.r = r;
    a.k = k;
    return a;
  };
  for (const int r : {2, 3, 4}) {
    add("C r=" + std::to_string(r), base("mutual", r));
    add("PC r=" + std::to_string(r), base("pairwise", r));
  }
  for (const auto& [r, k] : std::vector<std::pair<int, int>>{{3, 2}, {4, 2}, {4, 3}})
    add("kC r=" + std::to_string(r) + " k=" + std::to_string(k), base("kwise", r, k));

  struct Family {
    std::string a;
    std::vector<int> rs;
    std::vector<std::string> residues;
  };
  const std::vector<Family> families{
      {"2,3", {2, 3}, {"1,0", "1,2", "0,1"}},
      {"4,9", {2, 3}, {"2,0", "1,3", "3,6"}},
      {"2,3,5", {3}, {"1,1,1", "0,2,3"}},
  };
  for (const auto& f : families) {
    for (const int r : f.rs) {
      for (const std::string cls : {"mutual", "pairwise"}) {
        const std::string tag = std::string(cls == "mutual" ? "C" : "PC") + " r=" + std::to_string(r) + " a=" + f.a;
        auto a = base(cls, r);
        a.coprime_to = f.a;
        add(tag + " coprime-to", a);
        a = base(cls, r);
        a.divisible = f.a;
        add(tag + " divisible", a);
        for (const auto& b : f.residues) {
          a = base(cls, r);
          a.modulus = f.a;
          a.residue = b;
          add(tag + " b=" + b, a);
        }
      }
    }
  }
  for (const std::string cls : {"mutual", "pairwise"}) {
    auto a = base(cls, 3);
    a.groups = "0,0,1";
    a.group_moduli = "2,3";
    add(std::string(cls == "mutual" ? "C" : "PC") + " r=3 grouped 2|2|3", a);
  }
  auto uns = base("kwise", 3, 2);
  uns.coprime_to = "5,1,1";
  add("kC r=3 k=2 coprime-to 5,1,1", uns);
  return out;
}

inline int cmd_verify(const std::vector<CampaignEntry>& entries, const VerifyOptions& opts, const std::string& format,
                      std::ostream& out) {
  VerifyCounter counter;
  std::vector<io::json> rows;
  bool any_fail = false;
  for (const auto& e : entries) {
    const auto row = verify_entry(e, opts, counter);
    any_fail = any_fail || row.verdict == Verdict::fail;
    rows.push_back(row_json(row));
  }
  write_rows(out, rows, format);
  return any_fail ? exit_fail : exit_ok;
}

// ---------------------------------------------------------------------------
// discrepancy

inline io::json report_json(const DiscrepancyReport& rep, const TupleConstraint& c) {
  io::json j;
  j["constraint"] = c.describe();
  j["n"] = rep.n;
  j["value"] = io::round15(rep.value);
  j["exact"] = to_string(rep.num) + "/" + to_string(rep.den);
  j["argmax"] = rep.argmax;
  j["corner"] = to_string(rep.kind);
  j["total"] = rep.total;
  j["rate_ratio"] = rep.rate_ratio ? io::json(io::round15(*rep.rate_ratio)) : io::json(nullptr);
  j["witness"] = io::round15(rep.witness);
  return j;
}

inline int cmd_discrepancy(const ConstraintArgs& args, const std::vector<std::uint64_t>& scales,
                           const std::string& format, std::ostream& out) {
  if (scales.empty()) throw invalid_argument("discrepancy needs -n or --scan");
  const TupleConstraint c = args.build();
  std::vector<io::json> rows;
  for (const auto& rep : rate_scan(c, scales)) rows.push_back(report_json(rep, c));
  write_rows(out, rows, format);
  return exit_ok;
}

inline int cmd_measure(MeasureKind kind, std::uint64_t n, std::uint64_t step, const std::string& format,
                       std::ostream& out) {
  const auto rep = measure_cdf_error(kind, n, step);
  const double bound = kind == MeasureKind::gcd ? calibration::gcd_cdf_bound(n) : calibration::lcm_cdf_bound(n);
  io::json j;
  j["measure"] = to_string(kind);
  j["n"] = n;
  j["step"] = step;
  j["max_error"] = io::round15(rep.max_error);
  j["a"] = io::round15(rep.a);
  j["b"] = io::round15(rep.b);
  j["normalizer"] = io::count_json(rep.normalizer);
  j["bound"] = io::round15(bound);
  j["within_bound"] = rep.max_error <= bound;
  write_rows(out, {j}, format);
  return rep.max_error <= bound ? exit_ok : exit_fail;
}

// ---------------------------------------------------------------------------
// calibrate

inline int cmd_calibrate(std::ostream& out) {
  const auto m = calibration::measure();
  const auto f = calibration::frozen_values();
  const std::vector<std::tuple<const char*, double, double>> items{
      {"mutual_r2", m.mutual_r2, f.mutual_r2},       {"mutual_r3", m.mutual_r3, f.mutual_r3},
      {"pairwise_r2", m.pairwise_r2, f.pairwise_r2}, {"gcd_cdf", m.gcd_cdf, f.gcd_cdf},
      {"lcm_cdf", m.lcm_cdf, f.lcm_cdf},             {"gcd_norm_dev", m.gcd_norm_dev, f.gcd_norm_dev},
      {"lcm_norm", m.lcm_norm, f.lcm_norm},           {"pattern", m.pattern, f.pattern},
  };
  bool ok = true;
  for (const auto& [name, measured, frozen] : items) {
    const bool within = measured <= calibration::kHeadroom * frozen;
    ok = ok && within;
    io::json j;
    j["constant"] = name;
    j["measured"] = io::round15(measured);
    j["frozen"] = io::round15(frozen);
    j["within_headroom"] = within;
    out << j.dump() << '\n';
  }
  return ok ? exit_ok : exit_fail;
}

}  // namespace coprime_lab
