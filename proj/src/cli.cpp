#include "dcube/cli.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcube/affine.hpp"
#include "dcube/cube_engine.hpp"
#include "dcube/finite_system.hpp"
#include "dcube/proximal.hpp"
#include "dcube/return_times.hpp"
#include "dcube/structure.hpp"
#include "text_util.hpp"

namespace dcube::cli {

namespace {

using json = nlohmann::json;

// Thrown for unreadable or unsupported inputs; maps to kInputError.
struct InputError : Error {
  using Error::Error;
};

struct Common {
  bool human = false;
  bool timings = false;
  unsigned threads = 1;
  std::size_t max_tuples = EngineOptions{}.max_tuples;

  EngineOptions engine() const { return EngineOptions{threads, max_tuples}; }
};

struct Report {
  std::string command;
  std::vector<std::string> inputs;
  json result = json::object();
  CheckList checks;
  std::vector<std::pair<std::string, double>> timings;
  int exit_code = kPass;
};

class Timer {
 public:
  Timer(Report& r, std::string name) : r_(r), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
  ~Timer() {
    std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - start_;
    r_.timings.emplace_back(name_, ms.count());
  }

 private:
  Report& r_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw InputError("cannot write '" + path + "'");
}

enum class Kind { FiniteSystem, AffineSystem, PeriodicSet, CubeSet, Relation };

Kind detect(std::string_view text) {
  auto lines = text::logical_lines(text);
  if (lines.empty()) throw ParseError(1, "empty input");
  auto tag = lines.front().text.substr(0, lines.front().text.find_first_of(" \t"));
  if (tag == "finite-system") return Kind::FiniteSystem;
  if (tag == "affine-system") return Kind::AffineSystem;
  if (tag == "periodic-set") return Kind::PeriodicSet;
  if (tag == "cube-set") return Kind::CubeSet;
  if (tag == "pair-relation") return Kind::Relation;
  throw ParseError(lines.front().number, "unknown file kind '" + std::string(tag) + "'");
}

FiniteZdSystem load_finite(const std::string& path) {
  auto text = read_file(path);
  if (detect(text) != Kind::FiniteSystem) throw InputError("'" + path + "' is not a finite-system file");
  return load_system(text);
}

AffineZdSystem load_affine(const std::string& path) {
  auto text = read_file(path);
  if (detect(text) != Kind::AffineSystem) throw InputError("'" + path + "' is not an affine-system file");
  auto sys = parse_affine(text);
  auto v = validate_affine(sys);
  if (!v.valid()) throw InputError("invalid affine system: " + v.problems.front());
  return sys;
}

json checks_json(const CheckList& checks) {
  json arr = json::array();
  for (const auto& c : checks) arr.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}});
  return arr;
}

// Battery outcome: any failure is 1; otherwise unmet hypotheses are 2.
int battery_exit(const CheckList& checks, bool unmet_is_exit) {
  bool unmet = false;
  for (const auto& c : checks) {
    if (c.status == CheckStatus::Fail) return kPropertyFailure;
    if (c.status == CheckStatus::HypothesesUnmet) unmet = true;
  }
  return unmet && unmet_is_exit ? kHypothesesUnmet : kPass;
}

json cube_json(CubeView a) { return json(std::vector<PointId>(a.begin(), a.end())); }

json periodic_json(const PeriodicSet& s) {
  json j{{"k", s.k()}, {"moduli", s.moduli()}, {"residue_count", s.residue_count()},
         {"empty", s.empty()}, {"contains_zero", s.k() == 0 ? !s.empty() : contains_zero_vector(s)}};
  if (s.residue_count() <= 4096) j["residues"] = s.residues();
  return j;
}

std::string rational_list(const RationalTorusPoint& p) { return p.str(); }

bool use_color(const std::ostream& out) {
  return &out == &std::cout && std::getenv("NO_COLOR") == nullptr && isatty(STDOUT_FILENO);
}

void emit(const Report& r, const Common& c, std::ostream& out) {
  if (!c.human) {
    json j{{"command", r.command},
           {"inputs", r.inputs},
           {"result", r.result},
           {"checks", checks_json(r.checks)},
           {"exit_code", r.exit_code}};
    if (c.timings) {
      json t = json::object();
      for (const auto& [name, ms] : r.timings) t[name] = ms;
      j["timings_ms"] = t;
    }
    out << j.dump(2) << "\n";
    return;
  }
  const bool color = use_color(out);
  auto paint = [&](CheckStatus s) {
    std::string label = to_string(s);
    if (!color) return label;
    const char* code = s == CheckStatus::Pass ? "32" : s == CheckStatus::Fail ? "31" : "33";
    return "\x1b[" + std::string(code) + "m" + label + "\x1b[0m";
  };
  out << "command: " << r.command << "\n";
  for (const auto& in : r.inputs) out << "input: " << in << "\n";
  for (const auto& [key, value] : r.result.items())
    out << "  " << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
  auto label_size = [](const CheckResult& ch) { return std::string(to_string(ch.status)).size() + ch.name.size(); };
  std::size_t width = 0;
  for (const auto& ch : r.checks) width = std::max(width, label_size(ch));
  for (const auto& ch : r.checks) {
    out << "  [" << paint(ch.status) << "] " << ch.name;
    if (!ch.detail.empty()) out << std::string(width - label_size(ch) + 2, ' ') << ch.detail;
    out << "\n";
  }
  if (c.timings)
    for (const auto& [name, ms] : r.timings) out << "  time " << name << ": " << ms << " ms\n";
  out << "exit: " << r.exit_code << "\n";
}

// ---- commands -------------------------------------------------------------

void cmd_validate(Report& r, const std::string& path) {
  auto text = read_file(path);
  switch (detect(text)) {
    case Kind::FiniteSystem: {
      auto parsed = parse_system(text);
      auto rep = validate(parsed.data);
      r.result["kind"] = "finite-system";
      r.result["points"] = parsed.data.n_points;
      r.result["d"] = parsed.data.perms.size();
      r.result["valid"] = rep.valid();
      if (rep.valid()) r.result["orders"] = rep.orders;
      if (rep.commutation) {
        const auto& f = *rep.commutation;
        r.result["witness"] = {{"i", f.i}, {"j", f.j}, {"x", f.x}, {"TiTj_x", f.ij}, {"TjTi_x", f.ji}};
      }
      for (const auto& p : rep.problems) r.checks.push_back(fail("system invariants", p));
      if (rep.valid()) r.checks.push_back(pass("system invariants"));
      break;
    }
    case Kind::AffineSystem: {
      auto sys = parse_affine(text);
      auto v = validate_affine(sys);
      r.result["kind"] = "affine-system";
      r.result["r"] = sys.r;
      r.result["d"] = sys.dim();
      r.result["valid"] = v.valid();
      for (const auto& p : v.problems) r.checks.push_back(fail("affine invariants", p));
      if (v.valid()) r.checks.push_back(pass("affine invariants"));
      break;
    }
    case Kind::PeriodicSet: {
      auto s = parse_periodic_set(text);
      r.result["kind"] = "periodic-set";
      r.result["valid"] = true;
      r.result["set"] = periodic_json(s);
      r.checks.push_back(pass("periodic set"));
      break;
    }
    case Kind::CubeSet: {
      auto q = parse_cube_set(text);
      r.result["kind"] = "cube-set";
      r.result["valid"] = true;
      r.result["size"] = q.size();
      r.checks.push_back(pass("cube set"));
      break;
    }
    case Kind::Relation: {
      auto rel = parse_relation(text);
      r.result["kind"] = "pair-relation";
      r.result["valid"] = true;
      r.result["size"] = rel.size();
      r.checks.push_back(pass("pair relation"));
      break;
    }
  }
  r.exit_code = battery_exit(r.checks, false);
}

void cmd_cubes(Report& r, const Common& c, const std::string& path, PointId basepoint,
               const std::string& dump) {
  auto sys = load_finite(path);
  sys.check_point(basepoint);
  auto dirs = all_directions(sys.dim());
  std::optional<CubeSet> q;
  {
    Timer t(r, "enumerate Q");
    q.emplace(enumerate_Q(sys, dirs, c.engine()));
  }
  TupleSet k;
  {
    Timer t(r, "enumerate K");
    k = enumerate_K(sys, dirs, basepoint, c.engine());
  }
  r.result["points"] = sys.size();
  r.result["d"] = sys.dim();
  r.result["Q_size"] = q->size();
  r.result["basepoint"] = basepoint;
  r.result["K_size"] = k.size();
  if (!dump.empty()) {
    write_file(dump, format_cube_set(*q));
    r.result["dump"] = dump;
  }
}

void cmd_ucpp(Report& r, const Common& c, const std::string& path) {
  auto text = read_file(path);
  std::optional<CubeSet> q;
  if (detect(text) == Kind::CubeSet) {
    q.emplace(parse_cube_set(text));
  } else {
    auto sys = load_finite(path);
    Timer t(r, "enumerate Q");
    q.emplace(enumerate_Q(sys, c.engine()));
  }
  UcppVerdict v;
  {
    Timer t(r, "closing check");
    v = ucpp_check(*q);
  }
  r.result["Q_size"] = q->size();
  r.result["ucpp"] = v.holds;
  if (v.witness)
    r.result["witness"] = {{"first", cube_json(v.witness->first)},
                           {"second", cube_json(v.witness->second)},
                           {"vertex", v.witness->vertex.str()}};
  r.checks.push_back(verdict("unique closing parallelepiped property", v.holds,
                             v.holds ? "" : "two cubes differ only at vertex " + v.witness->vertex.str()));
  r.exit_code = battery_exit(r.checks, false);
}

void cmd_rpp(Report& r, const Common& c, const std::string& path) {
  auto sys = load_finite(path);
  std::optional<CubeSet> q;
  {
    Timer t(r, "enumerate Q");
    q.emplace(enumerate_Q(sys, c.engine()));
  }
  ProximalReport rep;
  {
    Timer t(r, "relations");
    rep = compute_R(sys, *q, c.engine());
  }
  json sizes = json::array();
  for (const auto& rel : rep.per_direction) sizes.push_back(rel.size());
  r.result["directional_sizes"] = sizes;
  r.result["R_size"] = rep.intersection.size();
  r.result["R_trivial"] = rep.trivial;
  r.result["R_equivalence"] = rep.equivalence.describe();
  auto labels = closure_labels(rep.intersection);
  r.result["R_classes"] = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  {
    Timer t(r, "battery");
    r.checks = proximal_battery(sys, *q, c.engine());
  }
  r.exit_code = battery_exit(r.checks, true);
}

SubgroupSpec parse_subgroup(const std::vector<unsigned>& gens, const std::vector<std::string>& words, unsigned d) {
  SubgroupSpec h;
  h.generators = gens;
  for (const auto& w : words) h.words.push_back(text::parse_csv_ints(w, 0));
  if (h.generators.empty() && h.words.empty()) h = SubgroupSpec::of(all_directions(d));
  return h;
}

void cmd_quotient(Report& r, const Common& c, const std::string& path, const std::string& relation,
                  const std::vector<unsigned>& gens, const std::vector<std::string>& words, const std::string& output) {
  auto sys = load_finite(path);
  PairRelation rel;
  if (relation == "rpp") {
    Timer t(r, "relations");
    rel = compute_R(sys, c.engine()).intersection;
  } else {
    auto h = parse_subgroup(gens, words, sys.dim());
    r.result["subgroup"] = h.str();
    rel = compute_QH(sys, h);
  }
  auto eq = check_equivalence(rel, sys);
  r.result["relation"] = relation;
  r.result["relation_size"] = rel.size();
  r.checks.push_back(verdict("relation is an invariant equivalence", eq.holds(), eq.describe()));
  if (!eq.holds()) {
    r.exit_code = kPropertyFailure;
    return;
  }
  auto f = quotient(sys, rel);
  r.result["quotient_points"] = f.target.size();
  r.result["map"] = f.map;
  if (!output.empty()) {
    write_file(output, format_system(f.target));
    r.result["output"] = output;
  }
  r.exit_code = kPass;
}

void cmd_structure(Report& r, const Common& c, const std::string& path, PointId basepoint) {
  auto sys = load_finite(path);
  sys.check_point(basepoint);
  auto dec = [&] {
    Timer t(r, "decomposition");
    return decompose_unchecked(sys, basepoint, c.engine());
  }();
  r.result["basepoint"] = basepoint;
  r.result["minimal"] = dec.base_minimal;
  r.result["ucpp"] = dec.base_ucpp;
  r.result["Y_size"] = dec.k.size();
  json fs = json::array();
  for (const auto& f : dec.factors) fs.push_back(f.points.size());
  r.result["factor_sizes"] = fs;
  r.result["embedding_injective"] = dec.injective;
  {
    Timer t(r, "battery");
    r.checks = structure_battery(sys, basepoint, c.engine());
  }
  r.exit_code = battery_exit(r.checks, true);
}

void cmd_affine_check(Report& r, const std::string& path) {
  auto text = read_file(path);
  if (detect(text) != Kind::AffineSystem) throw InputError("'" + path + "' is not an affine-system file");
  auto sys = parse_affine(text);
  auto v = validate_affine(sys);
  r.result["r"] = sys.r;
  r.result["d"] = sys.dim();
  r.result["valid"] = v.valid();
  r.result["unipotent"] = v.unipotent;
  json idx = json::array();
  for (const auto& n : v.nilpotency_index) idx.push_back(n ? json(*n) : json(nullptr));
  r.result["nilpotency_index"] = idx;
  r.result["matrices_commute"] = v.matrices_commute;
  r.result["translations_commute"] = v.translations_commute;
  r.checks.push_back(verdict("unipotent matrices", v.unipotent, ""));
  r.checks.push_back(verdict("matrices commute", v.matrices_commute, ""));
  r.checks.push_back(verdict("transformations commute", v.translations_commute, ""));
  if (!v.valid()) {
    r.exit_code = kPropertyFailure;
    return;
  }
  auto mc = matcond_check(sys);
  auto opt = [](const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); };
  r.result["MatCond1"] = opt(mc.cond1);
  r.result["MatCond2"] = opt(mc.cond2);
  r.result["MatCond3"] = mc.cond3;
  r.result["MatCond4"] = mc.cond4;
  r.exit_code = kPass;
}

void cmd_formula_test(Report& r, const Common& c, const std::string& path, std::int64_t range,
                      const std::vector<std::uint64_t>& qs) {
  auto sys = load_affine(path);
  SampleSpec spec{-range, range, qs.empty() ? SampleSpec{}.lattice_q : qs};
  FormulaVerdict v;
  {
    Timer t(r, "sampling");
    v = formula_equivalence_test(sys, spec, c.engine());
  }
  r.result["range"] = range;
  r.result["lattice_q"] = spec.lattice_q;
  r.result["conditions_hold"] = v.conditions_hold;
  r.result["outcome"] = to_string(v.outcome);
  r.result["samples"] = v.samples;
  if (v.witness)
    r.result["witness"] = {{"n", v.witness->n},
                           {"x", rational_list(v.witness->x)},
                           {"formula", rational_list(v.witness->formula)},
                           {"iteration", rational_list(v.witness->iteration)}};
  switch (v.outcome) {
    case FormulaOutcome::IdentityHolds:
    case FormulaOutcome::WitnessFound: r.exit_code = kPass; break;
    case FormulaOutcome::Contradiction: r.exit_code = kPropertyFailure; break;
    case FormulaOutcome::Inconclusive: r.exit_code = kHypothesesUnmet; break;
  }
}

void cmd_discretize(Report& r, const Common& c, const std::string& path, std::uint64_t q, bool full,
                    const std::string& base, const std::string& output) {
  auto sys = load_affine(path);
  DiscretizeOptions d{q, full ? DiscretizeMode::FullLattice : DiscretizeMode::Orbit, std::nullopt};
  if (!base.empty()) {
    std::vector<Rational> coords;
    for (auto item : text::parse_bracket_items("[" + base + "]", 0)) coords.push_back(parse_rational(item));
    d.base = RationalTorusPoint::reduce(std::move(coords));
  }
  auto disc = [&] {
    Timer t(r, "discretize");
    return discretize(sys, d, c.engine());
  }();
  r.result["q"] = q;
  r.result["mode"] = full ? "full" : "orbit";
  r.result["points"] = disc.system.size();
  r.result["minimal"] = is_minimal(disc.system).minimal;
  if (!output.empty()) {
    write_file(output, format_system(disc.system));
    r.result["output"] = output;
  } else {
    r.result["system"] = format_system(disc.system);
  }
}

void cmd_return_times(Report& r, const Common& c, const std::string& path, PointId point,
                      const std::vector<PointId>& target, bool containment, const std::string& output) {
  auto sys = load_finite(path);
  auto s = return_set(sys, point, target, c.engine());
  r.result["point"] = point;
  r.result["target"] = target;
  r.result["set"] = periodic_json(s);
  if (!output.empty()) {
    write_file(output, format_periodic_set(s));
    r.result["output"] = output;
  }
  if (containment) {
    auto v = joining_containment_check(sys, point, target, c.engine());
    if (!v.hypotheses_met) {
      r.checks.push_back(unmet("joining inside return times", "system is not minimal with the closing property"));
    } else {
      json parts = json::array();
      for (const auto& p : v.parts) parts.push_back(periodic_json(p));
      r.result["lift"] = v.lift;
      r.result["parts"] = parts;
      r.result["joining"] = periodic_json(v.joining);
      r.checks.push_back(verdict("joining inside return times", v.contained,
                                 v.witness ? "(" + text::join_ints(*v.witness) + ") is not a return time" : ""));
    }
  }
  r.exit_code = battery_exit(r.checks, true);
}

void cmd_joining(Report& r, const Common& c, const std::vector<std::string>& paths, const std::string& output) {
  std::vector<PeriodicSet> sets;
  for (const auto& p : paths) {
    auto text = read_file(p);
    if (detect(text) != Kind::PeriodicSet) throw InputError("'" + p + "' is not a periodic-set file");
    sets.push_back(parse_periodic_set(text));
  }
  auto j = d_joining(sets, c.engine());
  r.result["d"] = sets.size();
  r.result["joining"] = periodic_json(j);
  r.result["empty"] = j.empty();
  if (!output.empty()) {
    write_file(output, format_periodic_set(j));
    r.result["output"] = output;
  }
}

void cmd_verify(Report& r, const Common& c, const std::string& path, PointId basepoint) {
  auto text = read_file(path);
  auto append = [&](CheckList more) { r.checks.insert(r.checks.end(), more.begin(), more.end()); };
  switch (detect(text)) {
    case Kind::FiniteSystem: {
      auto sys = load_system(text);
      sys.check_point(basepoint);
      r.result["kind"] = "finite-system";
      r.result["points"] = sys.size();
      r.result["d"] = sys.dim();
      r.result["minimal"] = is_minimal(sys).minimal;
      r.checks.push_back(verdict("text round trip", load_system(format_system(sys)) == sys, ""));
      std::optional<CubeSet> q;
      {
        Timer t(r, "enumerate Q");
        q.emplace(enumerate_Q(sys, c.engine()));
      }
      r.result["Q_size"] = q->size();
      r.result["ucpp"] = ucpp_check(*q).holds;
      r.checks.push_back(verdict("cube set text round trip", parse_cube_set(format_cube_set(*q)) == *q, ""));
      {
        Timer t(r, "surgery battery");
        append(surgery_battery(sys, *q, c.engine()));
      }
      {
        Timer t(r, "relation battery");
        auto rep = compute_R(sys, *q, c.engine());
        r.checks.push_back(
            verdict("relation text round trip", parse_relation(format_relation(rep.intersection)) == rep.intersection, ""));
        append(proximal_battery(sys, *q, c.engine()));
      }
      {
        Timer t(r, "structure battery");
        append(structure_battery(sys, basepoint, c.engine()));
      }
      {
        Timer t(r, "return-time battery");
        append(return_times_battery(sys, basepoint, c.engine()));
        const PointId single[] = {basepoint};
        auto s = return_set(sys, basepoint, single, c.engine());
        r.checks.push_back(verdict("periodic set text round trip", parse_periodic_set(format_periodic_set(s)) == s, ""));
      }
      break;
    }
    case Kind::AffineSystem: {
      auto sys = parse_affine(text);
      r.result["kind"] = "affine-system";
      r.checks.push_back(verdict("text round trip", parse_affine(format_affine(sys)) == sys, ""));
      Timer t(r, "affine battery");
      append(affine_battery(sys, SampleSpec{}, c.engine()));
      break;
    }
    case Kind::PeriodicSet: {
      auto s = parse_periodic_set(text);
      r.result["kind"] = "periodic-set";
      r.result["set"] = periodic_json(s);
      r.checks.push_back(verdict("text round trip", parse_periodic_set(format_periodic_set(s)) == s, ""));
      if (s.k() > 0) {
        auto z = phi_image(s);
        r.result["coordinate_sum_image"] = periodic_json(z);
        bool ok = true;
        for (const auto& res : s.residues()) {
          std::int64_t sum = std::accumulate(res.begin(), res.end(), std::int64_t{0});
          if (!z.contains(std::vector<std::int64_t>{sum})) ok = false;
        }
        r.checks.push_back(verdict("coordinate sums lie in the image", ok, ""));
      }
      break;
    }
    case Kind::CubeSet: {
      auto q = parse_cube_set(text);
      r.result["kind"] = "cube-set";
      r.result["ucpp"] = ucpp_check(q).holds;
      r.checks.push_back(verdict("text round trip", parse_cube_set(format_cube_set(q)) == q, ""));
      break;
    }
    case Kind::Relation: {
      auto rel = parse_relation(text);
      r.result["kind"] = "pair-relation";
      r.checks.push_back(verdict("text round trip", parse_relation(format_relation(rel)) == rel, ""));
      break;
    }
  }
  std::size_t counts[4] = {0, 0, 0, 0};
  for (const auto& ch : r.checks) ++counts[static_cast<int>(ch.status)];
  r.result["passed"] = counts[0];
  r.result["failed"] = counts[1];
  r.result["hypotheses_unmet"] = counts[2];
  r.result["inconclusive"] = counts[3];
  r.exit_code = battery_exit(r.checks, false);
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_flag("--human", c.human, "Print a text report instead of JSON");
  sub->add_flag("--timings", c.timings, "Include wall-clock timings in the report");
  sub->add_option("--threads", c.threads, "Worker threads for enumeration")->check(CLI::Range(1U, 256U));
  sub->add_option("--max-tuples", c.max_tuples, "Size cap for enumerations")->check(CLI::PositiveNumber);
}

}  // namespace

int run(std::span<const std::string_view> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Directional cube computations on finite and affine Z^d-systems", "dcube"};
  app.require_subcommand(1);
  Common common;
  Report report;

  std::string path, relation = "rpp", output, dump, base;
  std::vector<std::string> paths, words;
  std::vector<unsigned> gens;
  std::vector<PointId> target;
  std::vector<std::uint64_t> qs;
  PointId basepoint = 0, point = 0;
  std::int64_t range = 3;
  std::uint64_t q = 0;
  bool full = false, containment = false;
  std::function<void()> action;

  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    add_common(s, common);
    return s;
  };
  auto file_arg = [&](CLI::App* s) { s->add_option("file", path, "Input file")->required(); };

  auto* validate = sub("validate", "Parse and validate an input file");
  file_arg(validate);
  validate->callback([&] { action = [&] { cmd_validate(report, path); }; });

  auto* cubes = sub("cubes", "Cube set sizes");
  file_arg(cubes);
  cubes->add_option("--basepoint", basepoint, "Base point of the rooted cube set");
  cubes->add_option("--dump", dump, "Write the cube set to this file");
  cubes->callback([&] { action = [&] { cmd_cubes(report, common, path, basepoint, dump); }; });

  auto* ucpp = sub("ucpp", "Unique closing parallelepiped property of a system or cube set");
  file_arg(ucpp);
  ucpp->callback([&] { action = [&] { cmd_ucpp(report, common, path); }; });

  auto* rpp = sub("rpp", "Regionally proximal relations and their battery");
  file_arg(rpp);
  rpp->callback([&] { action = [&] { cmd_rpp(report, common, path); }; });

  auto* quot = sub("quotient", "Quotient by a relation");
  file_arg(quot);
  quot->add_option("--relation", relation, "rpp or qh")->check(CLI::IsMember({"rpp", "qh"}));
  quot->add_option("--gens", gens, "Subgroup generators (qh)")->delimiter(',');
  quot->add_option("--word", words, "Subgroup word n1,...,nd (qh; repeatable)");
  quot->add_option("-o,--output", output, "Write the quotient system to this file");
  quot->callback([&] { action = [&] { cmd_quotient(report, common, path, relation, gens, words, output); }; });

  auto* structure = sub("structure", "Joining decomposition and its battery");
  file_arg(structure);
  structure->add_option("--basepoint", basepoint, "Base point");
  structure->callback([&] { action = [&] { cmd_structure(report, common, path, basepoint); }; });

  auto* affine = sub("affine-check", "Validate an affine system and evaluate the matrix conditions");
  file_arg(affine);
  affine->callback([&] { action = [&] { cmd_affine_check(report, path); }; });

  auto* formula = sub("formula-test", "Compare the closed-form formula with iteration");
  file_arg(formula);
  formula->add_option("--range", range, "Exponents range over [-R, R]")->check(CLI::Range(0, 1000));
  formula->add_option("--q", qs, "Lattice denominators (default 1..6)")->delimiter(',');
  formula->callback([&] { action = [&] { cmd_formula_test(report, common, path, range, qs); }; });

  auto* disc = sub("discretize", "Induced finite system on a rational lattice");
  file_arg(disc);
  disc->add_option("--q", q, "Lattice denominator")->required()->check(CLI::PositiveNumber);
  disc->add_flag("--full", full, "Use the whole lattice instead of one orbit");
  disc->add_option("--base", base, "Orbit base point p/q,... (default 0)");
  disc->add_option("-o,--output", output, "Write the finite system to this file");
  disc->callback([&] { action = [&] { cmd_discretize(report, common, path, q, full, base, output); }; });

  auto* rt = sub("return-times", "Return-time set of a point to a target set");
  file_arg(rt);
  rt->add_option("--point", point, "Starting point")->required();
  rt->add_option("--target", target, "Target point ids")->required()->delimiter(',');
  rt->add_flag("--containment", containment, "Also check that a joining lies inside the return times");
  rt->add_option("-o,--output", output, "Write the periodic set to this file");
  rt->callback([&] { action = [&] { cmd_return_times(report, common, path, point, target, containment, output); }; });

  auto* join = sub("joining", "Joining of periodic sets");
  join->add_option("files", paths, "Periodic-set files")->required();
  join->add_option("-o,--output", output, "Write the joining to this file");
  join->callback([&] { action = [&] { cmd_joining(report, common, paths, output); }; });

  auto* verify = sub("verify", "Run every applicable invariant battery");
  file_arg(verify);
  verify->add_option("--basepoint", basepoint, "Base point for rooted constructions");
  verify->callback([&] { action = [&] { cmd_verify(report, common, path, basepoint); }; });

  std::vector<std::string> argv;
  for (auto it = args.rbegin(); it != args.rend(); ++it) argv.emplace_back(*it);
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "dcube: " << e.what() << "\n";
    return kInputError;
  }

  for (auto* s : app.get_subcommands()) report.command = s->get_name();
  if (!path.empty()) report.inputs.push_back(path);
  report.inputs.insert(report.inputs.end(), paths.begin(), paths.end());
  try {
    action();
  } catch (const HypothesisUnmet& e) {
    err << "dcube: hypotheses unmet: " << e.what() << "\n";
    report.checks.push_back(unmet(report.command, e.what()));
    report.exit_code = kHypothesesUnmet;
  } catch (const ParseError& e) {
    err << "dcube: " << (path.empty() ? std::string() : path + ": ") << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "dcube: " << e.what() << "\n";
    return kInputError;
  }
  emit(report, common, out);
  return report.exit_code;
}

}  // namespace dcube::cli
