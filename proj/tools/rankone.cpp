#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rankone/arithfields.hpp"
#include "rankone/covers.hpp"
#include "rankone/discriminant.hpp"
#include "rankone/lengthsim.hpp"
#include "rankone/su_oracle.hpp"
#include "rankone/weylchar.hpp"

using json = nlohmann::ordered_json;
using namespace rankone;

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kExitOk = 0;
constexpr int kExitIdentity = 1;
constexpr int kExitInput = 2;

constexpr std::uint64_t kHardGroupCap = 20'000'000;
constexpr double kHardRecordCap = 20'000'000;
constexpr std::size_t kHardOrderCap = 100'000;

/// Input the user can fix: bad flags, files, or caps.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Outcome {
  json result = json::object();
  bool identities_hold = true;
};

std::string str(const Rational &r) { return r.str(); }
std::string str(const Integer &i) { return i.str(); }

json check_json(const CheckReport &r) {
  return {{"name", r.name}, {"checked", r.checked}, {"ok", r.ok()},
          {"failures", r.failures}, {"notes", r.notes}};
}

/// Cap from flag, else environment, else default; rejects values above the hard limit.
template <class T>
T resolve_cap(const std::optional<T> &flag, const char *env, T def, T hard) {
  T v = def;
  if (flag) {
    v = *flag;
  } else if (const char *e = std::getenv(env)) {
    try {
      v = static_cast<T>(std::stod(e));
    } catch (const std::exception &) {
      throw InputError(std::string(env) + " is not a number");
    }
  }
  if (!(v > 0) || v > hard)
    throw InputError(std::string("cap ") + env + " outside (0, " + std::to_string(hard) + "]");
  return v;
}

// ---------------------------------------------------------------------------
// verify-characters

struct CharactersConfig {
  std::optional<int> max_rank;
  int max_f = 11;
  int max_smk = 6;
  int max_recursion = 12;
  std::string corrupt;
};

Outcome cmd_verify_characters(CharactersConfig &c, json &config) {
  if (c.max_rank) {
    if (*c.max_rank < 1 || *c.max_rank > 6)
      throw InputError("--max-rank must be in [1, 6]");
    c.max_f = 2 * *c.max_rank + 1;
    c.max_smk = *c.max_rank;
  }
  if (c.max_f < 2 || c.max_smk < 0 || c.max_smk > 6 || c.max_recursion < 3)
    throw InputError("need max-f >= 2, 0 <= max-smk <= 6, max-recursion >= 3");
  NTable table;
  if (!c.corrupt.empty()) {
    int n = 0, k = 0;
    char comma = 0;
    std::istringstream in(c.corrupt);
    if (!(in >> n >> comma >> k) || comma != ',' || k < 0 || 2 * k > n)
      throw InputError("--corrupt-n-table expects n,k with 0 <= 2k <= n");
    table.set(n, k, n_comb(n, k) + 1);
  }
  config = {{"max_f", c.max_f}, {"max_smk", c.max_smk}, {"max_recursion", c.max_recursion},
            {"corrupted_n_table", c.corrupt.empty() ? json(nullptr) : json(c.corrupt)}};
  Outcome out;
  json ids = json::array();
  std::vector<std::string> failures;
  auto record = [&](const std::string &name, bool ok) {
    ids.push_back({{"identity", name}, {"ok", ok}});
    if (!ok)
      failures.push_back(name);
  };
  for (int n = 2; n <= c.max_f; ++n)
    record("f_expansion n=" + std::to_string(n), verify_f_expansion(n));
  for (int m = 0; m <= c.max_smk; ++m)
    for (int k = 0; k <= m; ++k)
      record("smk_decomposition m=" + std::to_string(m) + " k=" + std::to_string(k),
             verify_smk_decomposition(m, k, table));
  auto rec = verify_n_recursion(c.max_recursion, table);
  record("n_recursion n<=" + std::to_string(c.max_recursion), rec.ok());
  for (const auto &f : rec.failures)
    failures.push_back("n_recursion: " + f);
  out.result = {{"identities", ids}, {"failures", failures}};
  out.identities_hold = failures.empty();
  return out;
}

// ---------------------------------------------------------------------------
// verify-discriminant

struct DiscriminantConfig {
  std::string family = "all";
  std::optional<int> n;
  std::size_t su_samples = 100;
  std::uint64_t seed = 1;
};

std::vector<RankOneDescriptor> discriminant_targets(const DiscriminantConfig &c) {
  std::vector<RankOneDescriptor> out;
  auto add_range = [&](Family f, int lo, int hi) {
    if (c.n) {
      out.push_back(descriptor(f, *c.n));
      return;
    }
    for (int n = lo; n <= hi; ++n)
      out.push_back(descriptor(f, n));
  };
  auto want = [&](Family f) { return c.family == "all" || parse_family(c.family) == f; };
  if (c.family != "all")
    parse_family(c.family);
  if (want(Family::SO))
    add_range(Family::SO, 2, 8);
  if (want(Family::SU))
    add_range(Family::SU, 2, 4);
  if (want(Family::Sp))
    add_range(Family::Sp, 2, 4);
  if (want(Family::FII))
    out.push_back(descriptor(Family::FII));
  return out;
}

Outcome cmd_verify_discriminant(const DiscriminantConfig &c, json &config) {
  config = {{"family", c.family}, {"n", c.n ? json(*c.n) : json(nullptr)},
            {"su_samples", c.su_samples}, {"seed", c.seed}};
  std::vector<RankOneDescriptor> targets;
  try {
    targets = discriminant_targets(c);
  } catch (const DomainError &e) {
    throw InputError(e.what());
  }
  Outcome out;
  json groups = json::array();
  std::vector<std::string> warnings;
  for (const auto &d : targets) {
    auto rep = discriminant_report(d);
    json g = {{"group", d.group_name()},
              {"family", family_name(d.family)},
              {"n", d.n},
              {"m", d.m},
              {"rho", str(d.rho)},
              {"psi", psi_name(d.psi)},
              {"verified", rep.verified},
              {"eta", rep.table.rendered()},
              {"checks", check_json(rep.details)}};
    json coeffs = json::array();
    for (const auto &tc : trace_coefficients(d))
      coeffs.push_back({{"q", tc.q}, {"shift", tc.shift}, {"sign", tc.sign},
                        {"eta", tc.eta.to_string()}, {"symmetric_pair", tc.symmetric_pair}});
    g["trace_coefficients"] = coeffs;
    if (d.family == Family::Sp) {
      g["printed_row_mismatches"] = rep.printed_mismatch_rows();
      if (d.n == 2)
        warnings.push_back(d.group_name() + ": degenerate case list, table derived by regrouping");
      else if (!rep.printed_mismatch_rows().empty())
        warnings.push_back(d.group_name() + ": printed case list differs from the regrouped table");
    }
    if (d.family == Family::FII) {
      std::map<std::string, LaurentPoly> chars;
      g["spin7_derived"] = fii_spin_factor_derived(chars).to_string();
      g["spin7_printed"] = fii_spin_factor_printed(&chars).to_string();
      g["spin7_printed_matches"] = rep.printed_spin_factor_matches.value_or(false);
      if (!rep.printed_spin_factor_matches.value_or(false))
        warnings.push_back("FII: printed Spin(7) combination differs from the derived one");
    }
    if (d.family == Family::SU && c.su_samples > 0) {
      auto res = su_oracle(d.n, random_su_samples(d.n, c.su_samples, c.seed));
      g["su_adjoint_oracle"] = {{"samples", res.samples}, {"max_rel_error", res.max_rel_error},
                                {"ok", res.ok}};
      out.identities_hold = out.identities_hold && res.ok;
    }
    out.identities_hold = out.identities_hold && rep.verified;
    groups.push_back(g);
  }
  out.result = {{"groups", groups}, {"warnings", warnings}};
  return out;
}

// ---------------------------------------------------------------------------
// splitting

struct SplittingConfig {
  int p = 3;
  std::string ring = "gaussian";
  bool exhaustive = true;
  std::optional<std::uint64_t> group_cap;
};

Outcome cmd_splitting(const SplittingConfig &c, json &config) {
  RingKind kind;
  try {
    kind = parse_ring_kind(c.ring);
  } catch (const DomainError &e) {
    throw InputError(e.what());
  }
  auto cap = resolve_cap(c.group_cap, "RANKONE_GROUP_CAP", kDefaultGroupCap, kHardGroupCap);
  config = {{"p", c.p}, {"ring", c.ring}, {"exhaustive", c.exhaustive}, {"group_cap", cap}};
  GroupTable G = build_group(c.p, kind, cap);
  Outcome out;
  json &r = out.result;
  r["order"] = G.order();
  r["predicted_order"] = predicted_psl_order(c.p, kind);
  r["classes"] = G.classes().size();
  r["index_b1"] = G.index_of_subgroup(Subgroup::B1);
  r["index_b2"] = G.index_of_subgroup(Subgroup::B2);
  r["index_vq"] = G.index_of_subgroup(Subgroup::Vq);
  json vq = json::array();
  for (const auto &v : vq_classes(G))
    vq.push_back({{"class", v.class_id}, {"size", v.size}, {"expected_size", v.expected_size},
                  {"x_type", x_class_type_name(v.x_type)}, {"type", frobenius_type_name(v.type)},
                  {"variant", nilpotent_variant_name(v.variant)}, {"meets_b1", v.meets_b1},
                  {"meets_b2", v.meets_b2}});
  r["vq_classes"] = vq;
  auto lem = verify_vq_lemmas(G);
  r["vq_class_sizes"] = check_json(lem.sizes);
  r["intersections_per_class"] = check_json(lem.derived_intersections);
  r["intersections_as_printed"] = check_json(lem.printed_intersections);
  r["gassmann"] = gassmann_check(G, Subgroup::B1, Subgroup::B2);
  r["lmnr"] = lmnr_check(G, Subgroup::B1, Subgroup::B2);
  auto split = verify_splitting_lemma(G, c.exhaustive);
  r["splitting_lemma"] = check_json(split);
  bool ok = lem.sizes.ok() && lem.derived_intersections.ok() && split.ok() &&
            G.order() == predicted_psl_order(c.p, kind);
  if (kind == RingKind::gaussian) {
    auto table = splitting_table(G);
    r["n_computed"] = str(table.n_computed);
    r["n_printed"] = str(table.n_printed);
    json rows = json::array();
    for (const auto &row : table.rows)
      rows.push_back({{"subgroup", subgroup_name(row.subgroup)},
                      {"type", frobenius_type_name(row.type)},
                      {"d0", row.d0},
                      {"classes", row.classes},
                      {"weight", str(row.weight)},
                      {"average", {str(row.average.at_d0), str(row.average.at_pd0)}},
                      {"printed", {str(row.printed.at_d0), str(row.printed.at_pd0)}},
                      {"derived", {str(row.derived_average.at_d0), str(row.derived_average.at_pd0)}},
                      {"matches_printed", row.matches_printed()},
                      {"matches_derived", row.matches_derived(table.p)}});
    r["table"] = rows;
    r["table_matches_derived"] = table.all_match_derived();
    r["table_matches_printed"] = table.all_match_printed();
    ok = ok && table.all_match_derived();
  }
  out.identities_hold = ok;
  return out;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateConfig {
  int p = 3;
  double T = 0;
  std::optional<std::uint64_t> seed;
  LengthModel model;
  double slack = 1.25;
  int checkpoints = 8;
  std::optional<double> record_cap;
};

Outcome cmd_simulate(const SimulateConfig &c, json &config) {
  if (!c.seed)
    throw InputError("simulate needs --seed");
  if (c.checkpoints < 1)
    throw InputError("--checkpoints must be positive");
  auto cap = resolve_cap(c.record_cap, "RANKONE_RECORD_CAP", kDefaultRecordCap, kHardRecordCap);
  config = {{"p", c.p},           {"T", c.T},
            {"seed", *c.seed},    {"rho", c.model.rho},
            {"tick", c.model.tick}, {"collisions", c.model.collisions},
            {"collision_rate", c.model.collision_rate}, {"slack", c.slack},
            {"checkpoints", c.checkpoints}, {"record_cap", cap}};
  auto spec = generate(c.p, c.T, *c.seed, c.model, cap);
  auto rep = density_report(spec, c.slack);
  Outcome out;
  json &r = out.result;
  r["record_count"] = rep.record_count;
  r["d_l"] = str(rep.d_l);
  r["li"] = rep.li_value;
  r["ratio"] = rep.ratio;
  r["bound"] = rep.bound;
  r["bound_with_slack"] = rep.bound * rep.slack;
  r["bound_holds"] = rep.pass;
  r["count_gamma1"] = str(rep.count_gamma1);
  r["brute_diff"] = str(rep.brute_diff);
  r["closed_form_diff"] = str(rep.closed_form_diff);
  r["printed_closed_form_diff"] = str(rep.printed_closed_form_diff);
  r["identities"] = {{"diff_closed_form", rep.diff_identity},
                     {"piqr_rearrangement", rep.piqr_identity},
                     {"triangle", rep.triangle},
                     {"same_length_sets", rep.same_length_sets}};
  r["printed_coefficients_match"] = rep.printed_diff_identity;
  auto t1 = multiplicities(spec.records, Subgroup::B1, c.p);
  auto t2 = multiplicities(spec.records, Subgroup::B2, c.p);
  json cps = json::array();
  bool cps_ok = true;
  for (int k = 1; k <= c.checkpoints; ++k) {
    double Tk = c.T * k / c.checkpoints;
    auto ticks = spec.ticks_of(Tk);
    Integer brute = brute_force_difference(t1, t2, ticks);
    auto closed = diff_closed_form(spec.records, c.p, ticks);
    bool ok = closed.value == Rational(brute) && verify_piqr(closed, c.p, brute);
    cps_ok = cps_ok && ok;
    cps.push_back({{"T", Tk}, {"brute_diff", str(brute)}, {"closed_form_diff", str(closed.value)},
                   {"ok", ok}});
  }
  r["checkpoints"] = cps;
  std::vector<std::string> notes;
  if (!rep.printed_diff_identity)
    notes.push_back("printed difference coefficients disagree with the brute-force difference");
  if (rep.count_gamma1 == 0)
    notes.push_back("no cover geodesic of length <= T; the density comparison is vacuous");
  r["notes"] = notes;
  bool identities = rep.diff_identity && rep.piqr_identity && rep.triangle &&
                    rep.same_length_sets && cps_ok;
  out.identities_hold = identities && rep.pass;
  return out;
}

// ---------------------------------------------------------------------------
// gassmann

struct GassmannConfig {
  std::string builtin;
  std::string fixture;
  std::string scan;
  std::string input;
  int p = 3;
  std::optional<std::uint64_t> group_cap;
  std::optional<std::size_t> order_cap;
};

json triple_json(const arith::TripleReport &t) {
  json dens = json::array();
  for (const auto &d : t.densities)
    dens.push_back({{"d", d.d}, {"density", str(d.density)}, {"threshold", str(d.threshold)},
                    {"class_bound", str(d.class_bound)},
                    {"verdict", arith::density_verdict_name(d.verdict)}});
  return {{"name", t.name},          {"order", t.order},
          {"index_b1", t.index1},    {"index_b2", t.index2},
          {"exponent", t.exponent},  {"s_bad", dens},
          {"nonempty_degrees", t.nonempty_degrees()},
          {"gassmann", t.gassmann},  {"lmnr", t.lmnr},
          {"degree_one_reduction", t.degree_one_reduction}};
}

arith::FiniteGroup named_group(const std::string &name) {
  if (name == "s3")
    return arith::symmetric_group(3);
  if (name == "s4")
    return arith::symmetric_group(4);
  if (name == "s5")
    return arith::symmetric_group(5);
  if (name == "gl32")
    return arith::gl32();
  throw InputError("unknown group '" + name + "' (expected s3, s4, s5 or gl32)");
}

arith::GroupTriple fixture_triple(const std::string &name) {
  using arith::perm_from_cycles;
  if (name == "gl32-point-line") {
    auto G = std::make_shared<const arith::FiniteGroup>(arith::gl32());
    auto [point, line] = arith::gl32_point_line(*G);
    return arith::make_triple("GL(3,2): point and line stabilizers", G, point, line);
  }
  auto G = std::make_shared<const arith::FiniteGroup>(arith::symmetric_group(4));
  auto c3 = G->generated({G->index_of(perm_from_cycles(4, {{0, 1, 2}}))});
  if (name == "identical")
    return arith::make_triple("S4: <(0 1 2)> twice", G, c3, c3);
  if (name == "s4-a4") {
    auto a4 = G->generated({G->index_of(perm_from_cycles(4, {{0, 1, 2}})),
                            G->index_of(perm_from_cycles(4, {{1, 2, 3}}))});
    auto c4 = G->generated({G->index_of(perm_from_cycles(4, {{0, 1, 2, 3}}))});
    return arith::make_triple("S4: A4 and <(0 1 2 3)>", G, a4, c4);
  }
  throw InputError("unknown fixture '" + name + "' (expected gl32-point-line, identical, s4-a4)");
}

std::vector<arith::Perm> parse_perms(const json &j, const char *what) {
  if (!j.is_array())
    throw InputError(std::string(what) + ": expected an array of permutations");
  std::vector<arith::Perm> out;
  for (const auto &p : j)
    out.push_back(p.get<arith::Perm>());
  return out;
}

arith::ElementSet parse_subgroup(const arith::FiniteGroup &G, const json &j, const char *what,
                                 bool table_group) {
  if (!j.is_object())
    throw InputError(std::string(what) + ": expected an object");
  if (j.contains("elements")) {
    std::vector<arith::FiniteGroup::Index> el;
    for (auto l : j.at("elements").get<std::vector<std::uint32_t>>())
      el.push_back(G.from_label(l));
    return G.subset(el);
  }
  if (j.contains("generators")) {
    std::vector<arith::FiniteGroup::Index> gens;
    if (table_group) {
      for (auto l : j.at("generators").get<std::vector<std::uint32_t>>())
        gens.push_back(G.from_label(l));
    } else {
      for (const auto &p : parse_perms(j.at("generators"), what))
        gens.push_back(G.index_of(p));
    }
    return G.generated(gens);
  }
  throw InputError(std::string(what) + ": needs 'elements' or 'generators'");
}

arith::GroupTriple file_triple(const std::string &path, std::size_t cap) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open " + path);
  json j = json::parse(in);
  std::shared_ptr<const arith::FiniteGroup> G;
  bool table_group = false;
  if (j.contains("table")) {
    table_group = true;
    G = std::make_shared<const arith::FiniteGroup>(arith::FiniteGroup::from_table(
        j.at("table").get<std::vector<std::vector<std::uint32_t>>>(), cap));
  } else if (j.contains("generators")) {
    G = std::make_shared<const arith::FiniteGroup>(
        arith::FiniteGroup::from_generators(parse_perms(j.at("generators"), "generators"), cap));
  } else {
    throw InputError(path + ": needs 'table' or 'generators'");
  }
  auto B1 = parse_subgroup(*G, j.at("B1"), "B1", table_group);
  auto B2 = parse_subgroup(*G, j.at("B2"), "B2", table_group);
  return arith::make_triple(j.value("name", path), G, B1, B2);
}

Outcome cmd_gassmann(const GassmannConfig &c, json &config) {
  int sources = !c.builtin.empty() + !c.fixture.empty() + !c.scan.empty() + !c.input.empty();
  if (sources != 1)
    throw InputError("give exactly one of --builtin, --fixture, --scan, --input");
  auto order_cap = resolve_cap(c.order_cap, "RANKONE_ORDER_CAP", arith::kDefaultOrderCap,
                               kHardOrderCap);
  config = {{"builtin", c.builtin}, {"fixture", c.fixture}, {"scan", c.scan},
            {"input", c.input},     {"p", c.p},             {"order_cap", order_cap}};
  Outcome out;
  if (!c.scan.empty()) {
    auto s = arith::scan_subgroup_pairs(c.scan, named_group(c.scan));
    out.result = {{"group", s.group},
                  {"order", s.order},
                  {"subgroups", s.subgroups},
                  {"pairs", s.pairs},
                  {"gassmann_pairs", s.gassmann_pairs},
                  {"lmnr_pairs", s.lmnr_pairs},
                  {"closure_checks", s.closure_checks},
                  {"dichotomy_checks", s.dichotomy_checks},
                  {"degree_one_reduction_true", s.reduction_true},
                  {"logic_errors", s.logic_errors},
                  {"errors", s.errors}};
    out.identities_hold = s.ok();
    return out;
  }
  arith::ClassTriple ct;
  std::optional<bool> conjugate;
  if (!c.builtin.empty()) {
    if (c.builtin != "psl2")
      throw InputError("unknown builtin '" + c.builtin + "' (expected psl2)");
    auto cap = resolve_cap(c.group_cap, "RANKONE_GROUP_CAP", kDefaultGroupCap, kHardGroupCap);
    config["group_cap"] = cap;
    ct = arith::builtin_psl2_triple(c.p, cap);
  } else {
    auto t = !c.fixture.empty() ? fixture_triple(c.fixture) : file_triple(c.input, order_cap);
    ct = arith::class_triple(t);
    conjugate = arith::conjugate_subgroups(*t.A, t.B1, t.B2);
  }
  out.result = triple_json(arith::triple_report(ct));
  if (conjugate)
    out.result["conjugate"] = *conjugate;
  return out;
}

// ---------------------------------------------------------------------------
// Output

void flatten(const json &j, const std::string &prefix, std::vector<std::pair<std::string, std::string>> &out) {
  if (j.is_object()) {
    for (const auto &[k, v] : j.items())
      flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
  }
}

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string q = "\"";
  for (char ch : s)
    q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::string render(const json &report, const std::string &format) {
  if (format == "json")
    return report.dump(2) + "\n";
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  std::ostringstream os;
  if (format == "csv") {
    os << "key,value\n";
    for (const auto &[k, v] : rows)
      os << csv_field(k) << "," << csv_field(v) << "\n";
  } else {
    for (const auto &[k, v] : rows)
      os << k << ": " << v << "\n";
  }
  return os.str();
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Exact verification and simulation for rank-one length-spectrum identities"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "json";
  std::string output;
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("-o,--output", output, "Write the report to a file instead of stdout");

  CharactersConfig chars;
  auto *vc = app.add_subcommand("verify-characters", "Character-expansion identities");
  vc->add_option("--max-rank", chars.max_rank, "Cover D_r and B_r (f up to 2r+1, S_{m,k} up to m=r)");
  vc->add_option("--max-f", chars.max_f, "Largest n for the determinant expansion");
  vc->add_option("--max-smk", chars.max_smk, "Largest m for the S_{m,k} decomposition (<= 6)");
  vc->add_option("--max-recursion", chars.max_recursion, "Largest n for the N(n,k) recursion");
  vc->add_option("--corrupt-n-table", chars.corrupt, "Test hook: bump N(n,k) by one")->group("");

  DiscriminantConfig disc;
  auto *vd = app.add_subcommand("verify-discriminant", "Discriminant expansions and eta tables");
  vd->add_option("--family", disc.family, "SO, SU, Sp, FII or all");
  vd->add_option("--n", disc.n, "Group parameter: SO0(n+1,1), SU(n+1,1), Sp(n,1)");
  vd->add_option("--su-samples", disc.su_samples, "Samples for the SU adjoint oracle");
  vd->add_option("--seed", disc.seed, "Seed for the SU samples");

  SplittingConfig spl;
  auto *sp = app.add_subcommand("splitting", "Finite-group lemmas and splitting tables");
  sp->add_option("--p", spl.p, "Odd prime")->required();
  sp->add_option("--ring", spl.ring, "gaussian (Z[i]/p^2) or rational (Z/p^2)");
  sp->add_flag("!--no-exhaustive", spl.exhaustive, "Skip the sweep over all X in sl_2(F_q)");
  sp->add_option("--group-cap", spl.group_cap, "Largest group order to enumerate");

  SimulateConfig sim;
  bool collisions = false;
  auto *si = app.add_subcommand("simulate", "Synthetic length-spectrum run");
  si->add_option("--p", sim.p, "Inert prime");
  si->add_option("--T", sim.T, "Length cutoff")->required();
  si->add_option("--seed", sim.seed, "Seed (required)");
  si->add_flag("--collisions", collisions, "Let records reuse earlier lengths");
  si->add_option("--collision-rate", sim.model.collision_rate, "Fraction of reused lengths");
  si->add_option("--rho", sim.model.rho, "Growth exponent rho");
  si->add_option("--slack", sim.slack, "Factor on the density bound");
  si->add_option("--checkpoints", sim.checkpoints, "Cutoffs checked for the exact difference");
  si->add_option("--record-cap", sim.record_cap, "Largest expected record count");

  GassmannConfig gas;
  auto *ga = app.add_subcommand("gassmann", "S_bad sets, density dichotomy, degree-one reduction");
  ga->add_option("--builtin", gas.builtin, "psl2: the covers triple (PSL_2(Z[i]/p^2), B1, B2)");
  ga->add_option("--p", gas.p, "Prime for --builtin psl2");
  ga->add_option("--fixture", gas.fixture, "gl32-point-line, identical or s4-a4");
  ga->add_option("--scan", gas.scan, "Scan all subgroup pairs of s3, s4, s5 or gl32");
  ga->add_option("--input", gas.input, "JSON file with a table or generators and B1, B2");
  ga->add_option("--group-cap", gas.group_cap, "Largest PSL_2 order to enumerate");
  ga->add_option("--order-cap", gas.order_cap, "Largest order for ingested groups");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  sim.model.collisions = collisions;

  json report;
  report["schema_version"] = kSchemaVersion;
  json config;
  int code = kExitOk;
  std::string command = app.get_subcommands().front()->get_name();
  report["command"] = command;
  try {
    Outcome out;
    if (*vc)
      out = cmd_verify_characters(chars, config);
    else if (*vd)
      out = cmd_verify_discriminant(disc, config);
    else if (*sp)
      out = cmd_splitting(spl, config);
    else if (*si)
      out = cmd_simulate(sim, config);
    else
      out = cmd_gassmann(gas, config);
    report["config"] = config;
    report["result"] = out.result;
    code = out.identities_hold ? kExitOk : kExitIdentity;
  } catch (const InputError &e) {
    code = kExitInput;
    report["error"] = e.what();
  } catch (const DomainError &e) {
    code = kExitInput;
    report["error"] = e.what();
  } catch (const ResourceError &e) {
    code = kExitInput;
    report["error"] = e.what();
  } catch (const json::exception &e) {
    code = kExitInput;
    report["error"] = std::string("malformed input: ") + e.what();
  } catch (const LogicError &e) {
    code = kExitIdentity;
    report["error"] = e.what();
  } catch (const NonIntegralSplitting &e) {
    code = kExitIdentity;
    report["error"] = e.what();
  }
  if (!report.contains("config"))
    report["config"] = config;
  report["status"] = code == kExitOk ? "ok" : code == kExitIdentity ? "identity_failure" : "input_error";
  report["exit_code"] = code;
  if (report.contains("error"))
    std::cerr << "rankone: " << report["error"].get<std::string>() << "\n";

  std::string text = render(report, format);
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(output, std::ios::binary);
    if (!f) {
      std::cerr << "rankone: cannot write " << output << "\n";
      return kExitInput;
    }
    f << text;
  }
  return code;
}
