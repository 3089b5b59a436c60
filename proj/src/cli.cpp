#include "gerbeflow/cli.hpp"

#include "gerbeflow/chern.hpp"
#include "gerbeflow/ktheory.hpp"
#include "gerbeflow/spectral.hpp"
#include "gerbeflow/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>

namespace gerbeflow::cli {

namespace {

using json = nlohmann::ordered_json;
using verify::CheckRecord;
using verify::make_check;

constexpr double kTwoPi = 2 * std::numbers::pi;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Report {
  std::string command;
  json config = json::object();
  std::uint64_t seed = 1;
  std::vector<CheckRecord> checks;
  json data = json::object();
  std::vector<std::string> csv_header;  // spectra or profiles for --csv
  std::vector<std::vector<std::string>> csv_rows;
};

json to_json(const Report& r, std::optional<double> wall_time) {
  json j;
  j["command"] = r.command;
  j["engine_version"] = kEngineVersion;
  j["seed"] = r.seed;
  j["config"] = r.config;
  json checks = json::array();
  for (const auto& c : r.checks) {
    json x;
    x["name"] = c.name;
    x["status"] = c.status;
    x["value"] = c.value;
    x["expected"] = c.expected;
    x["tolerance"] = c.tolerance ? json(*c.tolerance) : json(nullptr);
    x["kind"] = c.kind;
    checks.push_back(std::move(x));
  }
  j["checks"] = std::move(checks);
  j["data"] = r.data;
  if (wall_time) j["wall_time_s"] = *wall_time;
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
  os << "\n";
}

std::vector<std::string> check_row(const CheckRecord& c) {
  return {c.name, c.status, c.value, c.expected, c.tolerance ? short_num(*c.tolerance) : "", c.kind};
}

void write_table(std::ostream& os, const Report& r) {
  os << "command  " << r.command << "\n";
  os << "config   " << r.config.dump() << "\n";
  os << "seed     " << r.seed << "\n\n";
  std::vector<std::vector<std::string>> rows{{"CHECK", "STATUS", "VALUE", "EXPECTED", "TOL", "KIND"}};
  for (const auto& c : r.checks) rows.push_back(check_row(c));
  std::vector<std::size_t> width(rows[0].size());
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << row[i];
      if (i + 1 < row.size()) os << std::string(width[i] - row[i].size() + 2, ' ');
    }
    os << "\n";
  }
  os << "\n";
  for (const auto& [key, value] : r.data.items())
    if (!value.is_array() && !value.is_object()) os << key << " = " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
}

// Options -----------------------------------------------------------------------

struct Common {
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string out_path;
  std::string csv_path;
  int threads = 0;
};

struct CocycleOpts {
  std::string fixture = "s2";
  long long k = 1;
  std::size_t samples = 32;
  int fock_window = 0;
};

struct FlowOpts {
  int window = 4;
  int cutoff = 2;
  std::size_t grid = 64;
  int rank = 1;
  int guard = -1;
  int max_excitation = -1;
  bool skip_stability = false;
};

struct KOpts {
  std::string fixture = "s2";
  long long twist = 1;
  int n = 1;
  long long l_plus = 1, l_minus = 1;
  long long lo = -8, hi = 8;
  bool list = false;
};

struct DensityOpts {
  int window = 4;
  int cutoff = 2;
  int rank = 1;
  std::vector<double> ts{100.0, 200.0};
  std::size_t samples = chern::kDefaultSamples;
  bool toy = false;
};

struct CompareOpts {
  long long l_plus = 1, l_minus = 1;
  std::vector<long long> first, second;
  long long consistency = 4;
};

spectral::SuperchargeConfig flow_config(int window, int cutoff, std::size_t grid, int rank, int guard, int max_exc) {
  if (window < 1 || window > 12) throw std::invalid_argument("--window must lie in [1, 12]");
  spectral::SuperchargeConfig c;
  c.window = {-window, window};
  c.cutoff = cutoff;
  c.grid = grid;
  c.rank = rank;
  if (guard >= 0) c.guard = guard;
  if (max_exc >= 0) c.max_excitation = max_exc;
  c.validate();
  return c;
}

json flow_config_json(const spectral::SuperchargeConfig& c) {
  json j;
  j["window"] = {c.window.lo, c.window.hi};
  j["cutoff"] = c.cutoff;
  j["grid"] = c.grid;
  j["rank"] = c.rank;
  j["guard"] = c.margin();
  j["max_excitation"] = c.max_excitation ? json(*c.max_excitation) : json(nullptr);
  return j;
}

// Subcommands -------------------------------------------------------------------

Report cmd_cocycles(const CocycleOpts& o, const Common& common) {
  verify::CocycleSuite s;
  s.fixture = o.fixture;
  s.k = o.k;
  s.samples = o.samples;
  s.seed = common.seed;
  s.fock_half_width = o.fock_window > 0 ? o.fock_window : (o.fixture == "t3" ? 5 : 4);
  Report r;
  r.command = "verify cocycles";
  r.config = {{"fixture", s.fixture}, {"k", s.k}, {"samples", s.samples}, {"fock_window", s.fock_half_width}};
  r.checks = verify::cocycles(s);
  return r;
}

Report cmd_fock(int window) {
  if (window < 4 || window > 9) throw std::invalid_argument("--window must lie in [4, 9]");
  Report r;
  r.command = "verify fock-algebra";
  r.config = {{"window", {-window, window}}};
  r.checks = verify::fock_algebra({-window, window});
  return r;
}

Report cmd_flow(const FlowOpts& o) {
  const auto cfg = flow_config(o.window, o.cutoff, o.grid, o.rank, o.guard, o.max_excitation);
  Report r;
  r.command = "spectral-flow";
  r.config = flow_config_json(cfg);
  r.config["stability"] = !o.skip_stability;

  const spectral::SuperchargeModel model(cfg);
  spectral::SpectralFlowReport fr;
  try {
    fr = spectral::spectral_flow(model);
  } catch (const spectral::UnresolvedCrossing& e) {
    r.checks.push_back({"nontriviality certificate", "inconclusive", e.what(), "nonzero net flow", std::nullopt,
                        "derived"});
    r.data["unresolved_interval"] = {e.phi_lo, e.phi_hi};
    return r;
  }
  const auto cert = spectral::certify(fr);
  r.checks.push_back({"nontriviality certificate", cert.verdict == "nontrivial" ? "pass" : "inconclusive",
                      "net_flow = " + std::to_string(fr.net_flow) + ", verdict " + cert.verdict, "nonzero net flow",
                      std::nullopt, "derived"});
  r.checks.push_back(make_check("periodicity defect", fr.periodicity_defect < spectral::kPeriodicityTolerance,
                                short_num(fr.periodicity_defect), "spec Q(2pi) = spec Q(0) on shifted blocks",
                                spectral::kPeriodicityTolerance, "numeric"));
  double worst = 0;
  bool exact = true;
  std::size_t columns = 0;
  for (const Rational& u : {Rational(0), Rational(1, 3), Rational(1)}) {
    const auto c = spectral::check_conjugation(model, u);
    worst = std::max(worst, c.max_deviation);
    exact = exact && c.exact;
    columns = c.columns;
  }
  r.checks.push_back(make_check("conjugation identity", exact && worst <= 1e-10 && columns > 0,
                                short_num(worst) + " over " + std::to_string(columns) + " columns at u = 0, 1/3, 1",
                                "Q(phi - 2pi) = g Q(phi) g^-1", 1e-10, "numeric"));
  r.checks.push_back(make_check("Lipschitz bound", fr.lipschitz_ok, fr.lipschitz_ok ? "holds" : "violated",
                                "|dlambda/du| <= 1 between grid points", std::nullopt, "derived"));

  r.data["net_flow"] = fr.net_flow;
  r.data["verdict"] = cert.verdict;
  r.data["implication"] = cert.implication;
  r.data["grid"] = fr.grid;
  r.data["refinements"] = fr.refinements;
  r.data["dimension"] = model.dim();
  r.data["sealed_blocks"] = fr.sealed_blocks;
  r.data["unsealed_blocks"] = fr.unsealed_blocks;
  r.data["periodic_pairs"] = fr.periodic_pairs.size();
  r.data["periodicity_defect"] = fr.periodicity_defect;
  r.data["max_residual"] = fr.max_residual;
  json crossings = json::array();
  for (const auto& c : fr.crossings)
    crossings.push_back({{"phi", c.phi}, {"direction", c.direction}, {"charge", c.charge}, {"sector", c.sector}});
  r.data["crossings"] = std::move(crossings);

  if (!o.skip_stability) {
    auto fine = cfg;
    fine.grid *= 2;
    const int fine_flow = spectral::spectral_flow(fine).net_flow;
    r.checks.push_back(make_check("grid doubling", fine_flow == fr.net_flow, std::to_string(fine_flow),
                                  std::to_string(fr.net_flow), std::nullopt, "exact"));
    auto wide = cfg;
    wide.window = {cfg.window.lo - 1, cfg.window.hi + 1};
    const spectral::SuperchargeModel wide_model(wide);
    const auto wr = spectral::spectral_flow(wide_model);
    const int here = spectral::shared_sector_flow(fr, wide_model);
    const int there = spectral::shared_sector_flow(wr, model);
    r.checks.push_back(make_check("window growth", here == there && here == fr.net_flow,
                                  "shared sectors " + std::to_string(here) + " vs " + std::to_string(there) +
                                      ", raw flow " + std::to_string(wr.net_flow),
                                  "flow over sectors sealed in both windows equals " + std::to_string(fr.net_flow),
                                  std::nullopt, "exact"));
    r.data["wider_window_raw_flow"] = wr.net_flow;
  }

  r.csv_header = {"phi", "block", "index", "eigenvalue"};
  for (const auto& t : fr.tracks)
    for (std::size_t i = 0; i < t.values.size(); ++i)
      r.csv_rows.push_back({num(fr.phis[i]), std::to_string(t.block), std::to_string(t.index), num(t.values[i])});
  return r;
}

std::optional<std::string> reference_total(const KOpts& o) {
  const std::string tors = o.twist > 1 ? " + Z_" + std::to_string(o.twist) : "";
  if (o.fixture == "s2" && o.twist >= 1) return "Z" + tors;
  if (o.fixture == "t2" && o.twist >= 1) return "Z^3" + tors;
  if (o.fixture == "rp") return "Z";
  if (o.fixture == "untwisted") return "Z^2";
  return std::nullopt;
}

json result_json(const ktheory::TwistedKResult& res) {
  return {{"quotient_piece", res.quotient_piece.str()},
          {"subgroup_piece", res.subgroup_piece.str()},
          {"total", res.total_str()},
          {"status", res.status},
          {"split_reason", res.split_reason}};
}

Report cmd_ktheory(const KOpts& o) {
  Report r;
  r.command = "ktheory";
  if (o.list) {
    r.config = {{"list", true}};
    json cat = json::array();
    for (const auto& f : ktheory::fixture_catalog())
      cat.push_back({{"name", f.name}, {"parameters", f.parameters}, {"description", f.description}});
    r.data["fixtures"] = std::move(cat);
    return r;
  }
  r.config = {{"fixture", o.fixture}};
  if (o.fixture == "equivariant-s2") {
    ktheory::LaurentPairWindow w;
    w.lo = o.lo;
    w.hi = o.hi;
    w.l_plus = o.l_plus;
    w.l_minus = o.l_minus;
    r.config["l_plus"] = w.l_plus;
    r.config["l_minus"] = w.l_minus;
    r.config["window"] = {w.lo, w.hi};
    const auto eq = ktheory::equivariant_s2_twisted_k1(w);
    r.data = result_json(eq.result);
    r.data["expected_rank"] = eq.expected_rank;
    r.data["joint_shift_rank"] = eq.joint_shift_rank;
    const auto doubled = w.doubled();
    r.checks.push_back(make_check("window stability", eq.stable, eq.result.total_str(),
                                  "same invariant factors on [" + std::to_string(doubled.lo) + ", " +
                                      std::to_string(doubled.hi) + "]",
                                  std::nullopt, "exact"));
    const std::size_t rank = eq.result.total->free_rank;
    r.checks.push_back(make_check("quotient rank", rank == eq.expected_rank, std::to_string(rank),
                                  "l+ + l- - 1 = " + std::to_string(eq.expected_rank), std::nullopt, "derived"));
    return r;
  }
  ktheory::KRingData data;
  if (o.fixture == "s2") {
    data = ktheory::s2_fixture(o.twist);
    r.config["twist"] = o.twist;
  } else if (o.fixture == "t2") {
    data = ktheory::t2_fixture(o.twist);
    r.config["twist"] = o.twist;
  } else if (o.fixture == "rp") {
    data = ktheory::rp_fixture(o.n);
    r.config["n"] = o.n;
  } else if (o.fixture == "untwisted") {
    data = ktheory::untwisted_s2_fixture();
  } else {
    throw std::invalid_argument("unknown ktheory fixture '" + o.fixture +
                                "' (expected s2, t2, rp, untwisted or equivariant-s2)");
  }
  const auto res = ktheory::solve_twisted_k1(data);
  r.data = result_json(res);
  r.data["name"] = data.name;
  if (auto ref = reference_total(o))
    r.checks.push_back(make_check("twisted K^1", res.total_str() == *ref, res.total_str(), *ref, std::nullopt,
                                  "reference"));
  if (o.fixture == "t2")
    r.checks.push_back(make_check("split status flagged", res.status == "assumed-split", res.status,
                                  "assumed-split", std::nullopt, "reference"));
  return r;
}

spectral::ExplicitFamily toy_family() {
  return {[](double phi) {
            eigen::DenseMatrix m(1, 1);
            m(0, 0) = phi / kTwoPi - 0.5;
            return m;
          },
          1};
}

Report cmd_density(const DensityOpts& o) {
  if (o.ts.empty()) throw std::invalid_argument("--t needs at least one value");
  for (std::size_t i = 0; i < o.ts.size(); ++i)
    if (!(o.ts[i] > 0) || (i && o.ts[i] <= o.ts[i - 1]))
      throw std::invalid_argument("--t values must be positive and increasing");
  if (o.samples < 2 || o.samples % 2) throw std::invalid_argument("--samples must be even and at least 2");
  Report r;
  r.command = "chern density";
  r.config = {{"family", o.toy ? "toy" : "supercharge"}, {"t", o.ts}, {"samples", o.samples}};
  std::optional<spectral::SuperchargeModel> model;
  if (!o.toy) {
    const auto cfg = flow_config(o.window, o.cutoff, 64, o.rank, -1, -1);
    r.config["window"] = {cfg.window.lo, cfg.window.hi};
    r.config["cutoff"] = cfg.cutoff;
    r.config["rank"] = cfg.rank;
    model.emplace(cfg);
  }
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  std::vector<chern::DensityProfile> profiles;
  json per_t = json::array();
  for (double t : o.ts) {
    auto p = o.toy ? chern::localization_density(toy_family(), eigen::DenseMatrix::identity(1), t, o.samples)
                   : chern::localization_density(*model, t, o.samples);
    const std::string at = " at t = " + short_num(t);
    r.checks.push_back(make_check("reliable profile" + at, p.reliable,
                                  std::to_string(p.sealed_blocks) + " sealed blocks, imaginary part " +
                                      short_num(p.max_imaginary),
                                  "sealed blocks present, real trace", chern::kImaginaryTolerance, "numeric"));
    if (o.toy) {
      const double closed = sqrt_pi * std::erf(std::sqrt(t) / 2);
      r.checks.push_back(make_check("toy closed form" + at, std::abs(p.integral - closed) <= 1e-9 * closed,
                                    num(p.integral), "sqrt(pi) erf(sqrt(t)/2) = " + num(closed), 1e-9, "derived"));
      if (t >= 200)
        r.checks.push_back(make_check("toy limit" + at, std::abs(p.integral - sqrt_pi) < 1e-6, num(p.integral),
                                      "sqrt(pi)", 1e-6, "numeric"));
    } else if (t < chern::localization_threshold() || p.m == 0) {
      r.checks.push_back({"localization" + at, "inconclusive", num(p.integral),
                          p.m == 0 ? "no spectral flow to localize" : "t below the localization threshold",
                          0.05, "numeric"});
    } else {
      const double target = sqrt_pi * p.m;
      r.checks.push_back(make_check("localization" + at, std::abs(p.integral - target) < 0.05 * std::abs(target),
                                    num(p.integral), "sqrt(pi) m = " + num(target), 0.05, "numeric"));
    }
    per_t.push_back({{"t", t},
                     {"integral", p.integral},
                     {"m", p.m},
                     {"sealed_blocks", p.sealed_blocks},
                     {"unsealed_integral", p.unsealed_integral},
                     {"max_imaginary", p.max_imaginary},
                     {"reliable", p.reliable}});
    for (std::size_t i = 0; i < p.phis.size(); ++i) r.csv_rows.push_back({num(t), num(p.phis[i]), num(p.density[i])});
    profiles.push_back(std::move(p));
  }
  r.csv_header = {"t", "phi", "density"};
  r.data["profiles"] = std::move(per_t);
  r.data["localization_threshold"] = chern::localization_threshold();
  if (profiles.size() >= 2) {
    const auto s = chern::transgression_stability(profiles);
    r.checks.push_back({"t-drift", s.status == "pre-asymptotic" ? "inconclusive" : s.status, short_num(s.drift),
                        "relative drift below " + short_num(chern::kDriftTolerance), chern::kDriftTolerance,
                        "numeric"});
    r.data["drift"] = s.drift;
    r.data["stability"] = s.status;
  }
  return r;
}

Report cmd_compare(const CompareOpts& o) {
  if (o.first.size() != 2 || o.second.size() != 2)
    throw std::invalid_argument("--first and --second take two exponents 'j+,j-'");
  Report r;
  r.command = "chern compare";
  r.config = {{"l_plus", o.l_plus}, {"l_minus", o.l_minus}, {"first", o.first}, {"second", o.second},
              {"consistency_window", o.consistency}};
  const auto a = chern::character_class(o.first[0], o.first[1], o.l_plus, o.l_minus);
  const auto b = chern::character_class(o.second[0], o.second[1], o.l_plus, o.l_minus);
  const auto verdict = chern::compare(a, b);
  r.data["verdict"] = chern::to_string(verdict);
  r.data["first_residues"] = {a.r_plus, a.r_minus};
  r.data["second_residues"] = {b.r_plus, b.r_minus};

  long long reach = 4 + 2 * std::max(o.l_plus, o.l_minus);
  for (long long e : {o.first[0], o.first[1], o.second[0], o.second[1]}) reach = std::max(reach, std::abs(e));
  ktheory::LaurentPairWindow w;
  w.lo = -reach;
  w.hi = reach;
  w.l_plus = o.l_plus;
  w.l_minus = o.l_minus;
  const auto k = ktheory::equivariant_s2_twisted_k1(w);
  const bool same = k.same_class({o.first[0], o.first[1]}, {o.second[0], o.second[1]});
  r.checks.push_back(make_check("agrees with the windowed K-class", same == (verdict == chern::Verdict::equal),
                                same ? "same K-class" : "different K-classes",
                                "verdict " + chern::to_string(verdict), std::nullopt, "exact"));
  if (o.consistency > 0) {
    const auto cert = chern::consistency_with_ktheory(-o.consistency, o.consistency, o.l_plus, o.l_minus);
    std::string value = std::to_string(cert.mismatches) + " mismatches in " + std::to_string(cert.comparisons);
    if (cert.witness)
      value += ", first (" + std::to_string(cert.witness->first.first) + "," +
               std::to_string(cert.witness->first.second) + ") vs (" + std::to_string(cert.witness->second.first) +
               "," + std::to_string(cert.witness->second.second) + ")";
    r.checks.push_back(make_check("consistency over the window", cert.passed(), value, "0 mismatches", std::nullopt,
                                  "exact"));
  }
  return r;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

Report cmd_diff(const std::string& a_path, const std::string& b_path) {
  json a = read_json_file(a_path), b = read_json_file(b_path);
  a.erase("wall_time_s");
  b.erase("wall_time_s");
  Report r;
  r.command = "report diff";
  r.config = {{"golden", a_path}, {"candidate", b_path}};
  json paths = json::array();
  for (const auto& op : json::diff(a, b)) paths.push_back(op["path"]);
  r.checks.push_back(make_check("identical report bodies", paths.empty(),
                                std::to_string(paths.size()) + " differing paths", "0 differing paths",
                                std::nullopt, "exact"));
  r.data["differences"] = std::move(paths);
  return r;
}

void emit(const Report& r, const Common& common, double wall, std::ostream& out) {
  const json full = to_json(r, wall);
  if (common.format == "json") {
    out << full.dump(2) << "\n";
  } else if (common.format == "csv") {
    write_csv_row(out, {"name", "status", "value", "expected", "tolerance", "kind"});
    for (const auto& c : r.checks) write_csv_row(out, check_row(c));
  } else {
    write_table(out, r);
  }
  if (!common.out_path.empty()) {
    std::ofstream f(common.out_path);
    if (!f) throw std::invalid_argument("cannot write " + common.out_path);
    f << full.dump(2) << "\n";
  }
  if (!common.csv_path.empty()) {
    if (r.csv_header.empty()) throw std::invalid_argument("'" + r.command + "' produces no CSV spectra or profiles");
    std::ofstream f(common.csv_path);
    if (!f) throw std::invalid_argument("cannot write " + common.csv_path);
    write_csv_row(f, r.csv_header);
    for (const auto& row : r.csv_rows) write_csv_row(f, row);
  }
}

}  // namespace

std::string strip_timing(const std::string& report_json) {
  json j = json::parse(report_json);
  j.erase("wall_time_s");
  return j.dump();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verification engine for Fock-space gerbes, spectral flow and twisted K-theory", "gerbeflow"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "Seed for sampled chains")->capture_default_str();
  app.add_option("--format", common.format, "Report format")
      ->check(CLI::IsMember({"json", "table", "csv"}))
      ->capture_default_str();
  app.add_option("--out", common.out_path, "Also write the JSON report to this file");
  app.add_option("--csv", common.csv_path, "Write eigenvalue tracks or density profiles as CSV");
  app.add_option("--threads", common.threads, "Worker cap; overrides GERBEFLOW_THREADS")->check(CLI::PositiveNumber);

  auto* verify_cmd = app.add_subcommand("verify", "Exact identity checks")->require_subcommand(1)->fallthrough();
  CocycleOpts co;
  auto* cocycles = verify_cmd->add_subcommand("cocycles", "Groupoid cocycle suites")->fallthrough();
  cocycles->add_option("--fixture", co.fixture, "s2 or t3")->capture_default_str();
  cocycles->add_option("--k", co.k, "Line bundle degree or extension class")->capture_default_str();
  cocycles->add_option("--samples", co.samples, "Composable tuples per check")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000}))
      ->capture_default_str();
  cocycles->add_option("--fock-window", co.fock_window, "Fock window half-width (default 4, or 5 for t3)");
  int fock_window = 6;
  auto* fock_cmd = verify_cmd->add_subcommand("fock-algebra", "CAR, loop algebra and shift relations")->fallthrough();
  fock_cmd->add_option("--window", fock_window, "Mode window half-width")->capture_default_str();

  FlowOpts fo;
  auto* flow = app.add_subcommand("spectral-flow", "Spectral flow of the supercharge family")->fallthrough();
  flow->add_option("--window", fo.window, "Mode window half-width")->capture_default_str();
  flow->add_option("--cutoff", fo.cutoff, "Spinor cutoff")->capture_default_str();
  flow->add_option("--grid", fo.grid, "Initial grid intervals over [0, 2pi]")->capture_default_str();
  flow->add_option("--rank", fo.rank, "Number of block-diagonal copies")->capture_default_str();
  flow->add_option("--guard", fo.guard, "Compression margin (default: cutoff)");
  flow->add_option("--max-excitation", fo.max_excitation, "Fock basis excitation cap");
  flow->add_flag("--skip-stability", fo.skip_stability, "Skip the grid-doubling and window-growth reruns");

  KOpts ko;
  auto* kt = app.add_subcommand("ktheory", "Twisted K^1 groups")->fallthrough();
  kt->add_option("--fixture", ko.fixture, "s2, t2, rp, untwisted or equivariant-s2")->capture_default_str();
  kt->add_option("--twist", ko.twist, "Twist k for s2 and t2")->capture_default_str();
  kt->add_option("--n", ko.n, "n for the projective space RP^{2n}")->capture_default_str();
  kt->add_option("--l-plus", ko.l_plus, "Shift exponent l+")->capture_default_str();
  kt->add_option("--l-minus", ko.l_minus, "Shift exponent l-")->capture_default_str();
  kt->add_option("--lo", ko.lo, "Lowest Laurent exponent")->capture_default_str();
  kt->add_option("--hi", ko.hi, "Highest Laurent exponent")->capture_default_str();
  kt->add_flag("--list", ko.list, "List the fixtures");

  auto* chern_cmd = app.add_subcommand("chern", "Character density and class comparison")->require_subcommand(1)->fallthrough();
  DensityOpts dop;
  auto* density = chern_cmd->add_subcommand("density", "Localization of the character density")->fallthrough();
  density->add_option("--window", dop.window, "Mode window half-width")->capture_default_str();
  density->add_option("--cutoff", dop.cutoff, "Spinor cutoff")->capture_default_str();
  density->add_option("--rank", dop.rank, "Number of block-diagonal copies")->capture_default_str();
  density->add_option("--t", dop.ts, "Scale parameters, increasing")->delimiter(',')->capture_default_str();
  density->add_option("--samples", dop.samples, "Simpson intervals (even)")->capture_default_str();
  density->add_flag("--toy", dop.toy, "Use the scalar family phi/2pi - 1/2");
  CompareOpts cop;
  auto* compare = chern_cmd->add_subcommand("compare", "Compare two equivariant line bundle classes")->fallthrough();
  compare->add_option("--l-plus", cop.l_plus, "Shift exponent l+")->check(CLI::PositiveNumber)->capture_default_str();
  compare->add_option("--l-minus", cop.l_minus, "Shift exponent l-")->check(CLI::PositiveNumber)->capture_default_str();
  compare->add_option("--first", cop.first, "Exponents j+,j-")->delimiter(',')->expected(2)->required();
  compare->add_option("--second", cop.second, "Exponents j+,j-")->delimiter(',')->expected(2)->required();
  compare->add_option("--consistency", cop.consistency, "Half-width of the exhaustive cross-check (0 to skip)")
      ->check(CLI::Range(0LL, 12LL))
      ->capture_default_str();

  auto* report_cmd = app.add_subcommand("report", "Report utilities")->require_subcommand(1)->fallthrough();
  std::string golden, candidate;
  auto* diff = report_cmd->add_subcommand("diff", "Compare two reports with timing removed")->fallthrough();
  diff->add_option("golden", golden, "Golden report")->required();
  diff->add_option("candidate", candidate, "Candidate report")->required();

  auto leaf_help = [&app] {
    CLI::App* leaf = &app;
    while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();
    return leaf->help();
  };

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << leaf_help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  if (common.threads > 0) ::setenv("GERBEFLOW_THREADS", std::to_string(common.threads).c_str(), 1);
  const auto start = std::chrono::steady_clock::now();
  Report report;
  try {
    if (*cocycles)
      report = cmd_cocycles(co, common);
    else if (*fock_cmd)
      report = cmd_fock(fock_window);
    else if (*flow)
      report = cmd_flow(fo);
    else if (*kt)
      report = cmd_ktheory(ko);
    else if (*density)
      report = cmd_density(dop);
    else if (*compare)
      report = cmd_compare(cop);
    else
      report = cmd_diff(golden, candidate);
    report.seed = common.seed;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit(report, common, wall, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n\n" << leaf_help();
    return 2;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n\n" << leaf_help();
    return 2;
  } catch (const fock::BasisTooLarge& e) {
    err << "error: " << e.what() << "\n\n" << leaf_help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  const bool failed =
      std::any_of(report.checks.begin(), report.checks.end(), [](const CheckRecord& c) { return c.status == "fail"; });
  return failed ? 1 : 0;
}

}  // namespace gerbeflow::cli
