// koethe-lab: command-line front end for the certificate checks and example systems.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "klab/klab.hpp"

#ifndef KLAB_VERSION
#define KLAB_VERSION "0.0.0"
#endif

namespace {

using klab::Json;

constexpr int kUsageError = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string output;
  std::string format = "json";
  std::uint64_t seed = 1;

  // systems and matrices
  std::string system = "hadamard";
  std::string d = "linear";
  std::string norm = "sup";
  std::string matrix = "power";
  std::string matrix_b = "scaled:2";
  bool search = false;

  // bounds
  std::optional<std::size_t> K;  // default depends on the system
  std::size_t J = 8;
  unsigned P = 6;
  unsigned Q = 6;
  unsigned R = 6;
  unsigned q = 0;
  unsigned r = 2;
  unsigned p = 1;
  std::size_t depth = 1000000;
  std::string tail = "auto";
  std::size_t count = 1000;
  std::size_t dim = 64;
  std::size_t nnz = 16;
  unsigned steps = 10;

  // build bk / partition / demo
  std::string input;
  std::size_t k0 = 0;
  std::optional<std::uint64_t> C;
  std::string generators;
  std::size_t n = 0;
  std::optional<double> tolerance;
  std::string xi = "3,1,3,0.5,1";
};

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split(s, ',')) out.push_back(klab::parse_double(t));
  if (out.empty()) throw UsageError("expected a comma-separated list of numbers, got '" + s + "'");
  return out;
}

klab::Complex parse_complex(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) return {klab::parse_double(s), 0.0};
  return {klab::parse_double(s.substr(0, colon)), klab::parse_double(s.substr(colon + 1))};
}

std::vector<unsigned> parse_schedule(const std::string& d, std::size_t K) {
  if (d == "linear") return klab::linear_schedule(K);
  std::vector<unsigned> out;
  for (double x : parse_reals(d)) {
    if (x < 0 || x != static_cast<unsigned>(x)) throw UsageError("--d entries must be non-negative integers");
    out.push_back(static_cast<unsigned>(x));
  }
  return out;
}

klab::KoetheMatrix parse_matrix(const std::string& text) {
  if (text == "power") return klab::power_matrix();
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "scaled" && !arg.empty()) return klab::scaled_power_matrix(klab::parse_double(arg));
  if (kind == "exp" && !arg.empty()) return klab::exponential_matrix(klab::parse_double(arg));
  if (kind == "power" && !arg.empty()) {
    std::vector<klab::LogTower> n;
    for (double x : parse_reals(arg)) n.push_back(klab::LogTower::from_real(x));
    return klab::sequence_power_matrix(std::move(n));
  }
  throw UsageError("unknown matrix '" + text + "' (power, scaled:S, exp:B, power:n1,n2,...)");
}

klab::TailStrategy parse_tail(const std::string& t) {
  if (t == "auto") return klab::TailStrategy::automatic;
  if (t == "integral") return klab::TailStrategy::integral;
  if (t == "geometric") return klab::TailStrategy::geometric;
  throw UsageError("unknown tail strategy '" + t + "'");
}

klab::RowNorm parse_norm(const std::string& n) {
  if (n == "sup") return klab::RowNorm::sup;
  if (n == "l2") return klab::RowNorm::l2;
  throw UsageError("unknown norm '" + n + "' (sup, l2)");
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::size_t rows_or(const Options& o, std::size_t fallback) { return o.K.value_or(fallback); }

std::size_t default_rows(const Options& o) { return rows_or(o, o.system == "tower" ? 8 : 100); }

/// A named row system: rows(k, q) for k <= K.
struct RowSystem {
  klab::GradedRule rows;
  std::size_t K = 0;
  Json descriptor;
  std::optional<klab::TowerSystem> tower;
};

RowSystem load_system(const Options& o, unsigned grades) {
  RowSystem s;
  const std::string& name = o.system;
  if (name == "hadamard") {
    s.K = default_rows(o);
    auto d = parse_schedule(o.d, s.K);
    const auto sys = klab::hadamard_system(d, s.K);
    s.rows = klab::subalgebra_rows(sys, klab::singleton_partition(s.K), grades, parse_norm(o.norm)).rule();
    s.descriptor = {{"name", "hadamard"}, {"d", d}, {"norm", o.norm}};
  } else if (name == "tower") {
    s.K = default_rows(o);
    s.tower = klab::tower_system(s.K, o.J);
    s.rows = klab::tower_rows(*s.tower);
    s.descriptor = {{"name", "tower"}, {"sha256", sha256_hex(klab::to_json(*s.tower).dump())}};
  } else if (name.rfind("power:", 0) == 0) {
    auto n = parse_reals(name.substr(6));
    auto m = klab::sequence_power_matrix([&] {
      std::vector<klab::LogTower> v;
      for (double x : n) v.push_back(klab::LogTower::from_real(x));
      return v;
    }());
    s.rows = m.rule();
    s.K = n.size();
    s.descriptor = {{"name", "power"}, {"n", n}};
  } else if (name.rfind("file:", 0) == 0) {
    const std::string path = name.substr(5);
    const Json j = read_json_file(path);
    if (j.contains("rows")) {
      std::vector<std::vector<klab::LogTower>> rows;
      unsigned Q = ~0u;
      for (const auto& r : j.at("rows")) {
        rows.emplace_back();
        for (const auto& v : r) rows.back().push_back(klab::LogTower::parse(v.get<std::string>()));
        if (rows.back().empty()) throw UsageError("row " + std::to_string(rows.size()) + " in '" + path + "' is empty");
        Q = std::min<unsigned>(Q, static_cast<unsigned>(rows.back().size() - 1));
      }
      for (auto& r : rows) r.resize(Q + 1);
      s.K = rows.size();
      s.rows = klab::RowTable(std::move(rows), Q).rule();
    } else if (j.contains("vectors")) {
      const auto sys = klab::ortho_system_from_json(j);
      const auto part = j.contains("partition") ? klab::partition_from_json(j.at("partition"))
                                                : klab::singleton_partition(sys.size());
      s.rows = klab::subalgebra_rows(sys, part, grades, parse_norm(o.norm)).rule();
      s.K = part.classes.size();
    } else {
      throw UsageError("'" + path + "' needs a \"rows\" table or \"vectors\" system");
    }
    s.descriptor = {{"name", "file"}, {"sha256", sha256_hex(j.dump())}};
  } else {
    throw UsageError("unknown system '" + name + "' (hadamard, tower, power:n1,n2,..., file:path)");
  }
  return s;
}

struct Outcome {
  Json result;
  int exit = 0;
  std::optional<std::string> csv;
};

std::string witness_csv(const std::vector<const klab::Certificate*>& certs) {
  std::ostringstream os;
  os << "condition,params,lhs,rhs\n";
  for (const auto* c : certs) {
    for (const auto& w : c->witnesses) {
      os << c->condition << ',';
      bool first = true;
      for (const auto& [k, v] : w.params) {
        os << (first ? "" : ";") << k << '=' << v;
        first = false;
      }
      os << ',' << w.lhs.to_string() << ',' << w.rhs.to_string() << '\n';
    }
  }
  return os.str();
}

Outcome certificate_outcome(const klab::Certificate& c) {
  return {klab::to_json(c), klab::exit_code(c.status), witness_csv({&c})};
}

int combined_exit(const klab::Certificate& a, const klab::Certificate& b) {
  if (a.refuted() || b.refuted()) return klab::exit_code(klab::Status::candidate_refutation);
  if (!a.verified() || !b.verified()) return klab::exit_code(klab::Status::inconclusive);
  return 0;
}

// --- commands --------------------------------------------------------------

Outcome run_gp(const Options& o, Json& config) {
  config.update({{"matrix", o.matrix}, {"q", o.q}, {"r", o.r}, {"depth", o.depth}, {"tail", o.tail}});
  const auto A = parse_matrix(o.matrix);
  klab::NuclearityOptions opt;
  opt.tail = parse_tail(o.tail);
  return certificate_outcome(klab::gp_nuclearity_check(A, o.q, o.r, o.depth, opt));
}

Outcome run_alpha_beta(const Options& o, Json& config) {
  if (!o.search) {
    const std::size_t J = rows_or(o, 10000);
    config.update({{"a", o.matrix}, {"b", o.matrix_b}, {"Q", o.Q}, {"R", o.R}, {"J", J}});
    const auto [alpha, beta] = klab::equivalence_check(parse_matrix(o.matrix), parse_matrix(o.matrix_b),
                                                       klab::identity_map(), {o.Q, o.R, J});
    return {Json{{"alpha", klab::to_json(alpha)}, {"beta", klab::to_json(beta)}}, combined_exit(alpha, beta),
            witness_csv({&alpha, &beta})};
  }
  // embedding search for a row system against (n_k^q)
  const auto sys = load_system(o, std::max({o.Q, o.R, 8u}));
  config.update({{"system", sys.descriptor}, {"K", sys.K}, {"Q", o.Q}, {"R", o.R}, {"search", true}});
  klab::EmbeddingOptions opt;
  opt.bounds = {o.Q, o.R};
  if (o.C) opt.C = o.C;
  const auto rep = klab::embedding_check(sys.rows, sys.K, opt);
  Json bk{{"b", rep.bk.b}, {"C", rep.bk.C}, {"k0", rep.bk.k0}};
  return {Json{{"p1", rep.p1},
               {"sigma", rep.sigma},
               {"n", std::move(bk)},
               {"alpha", klab::to_json(rep.alpha)},
               {"beta", klab::to_json(rep.beta)}},
          combined_exit(rep.alpha, rep.beta), witness_csv({&rep.alpha, &rep.beta})};
}

Outcome run_condition_iv(const Options& o, Json& config) {
  config.update({{"P", o.P}, {"Q", o.Q}, {"R", o.R}, {"search", o.search}});
  if (o.system == "hadamard" && !o.search) {
    const std::size_t K = default_rows(o);
    auto d = parse_schedule(o.d, K);
    config.update({{"K", K}, {"system", {{"name", "hadamard"}, {"d", d}, {"norm", "sup"}}}});
    return certificate_outcome(klab::hadamard_condition_report(d, K, o.Q));
  }
  if (o.system == "tower" && !o.search) {
    const std::size_t K = default_rows(o);
    config.update({{"K", K}, {"J", o.J}});
    const auto sys = klab::tower_system(K, o.J);
    config["system"] = {{"name", "tower"}, {"sha256", sha256_hex(klab::to_json(sys).dump())}};
    return certificate_outcome(klab::divergence_report(sys, o.P, o.R));
  }
  const auto sys = load_system(o, std::max(o.P, o.Q));
  config.update({{"K", sys.K}, {"system", sys.descriptor}});
  if (sys.tower) config["J"] = o.J;
  return certificate_outcome(klab::condition_iv_check(sys.rows, {o.P, o.Q, o.R, sys.K}));
}

Outcome run_dn(const Options& o, Json& config) {
  config.update({{"p", o.p}, {"count", o.count}, {"dim", o.dim}, {"nnz", o.nnz}});
  if (o.dim < 1 || o.nnz < 1) throw UsageError("--dim and --nnz must be positive");
  klab::Rng rng(o.seed);
  klab::Certificate cert;
  cert.condition = "dn";
  cert.bounds = {{"p", o.p}, {"count", static_cast<std::int64_t>(o.count)}, {"dim", static_cast<std::int64_t>(o.dim)}};
  std::size_t failures = 0;
  long double worst = 0;
  std::optional<klab::Witness> worst_w;
  for (std::size_t i = 0; i < o.count; ++i) {
    const auto x = klab::random_truncated_vector(rng, o.dim, std::min(o.nnz, o.dim));
    if (x.empty()) continue;
    const auto res = klab::dn_check(x, o.p);
    klab::Witness w{{{"sample", static_cast<std::int64_t>(i)}}, res.lhs, res.rhs};
    if (!res.ok) {
      ++failures;
      if (cert.witnesses.size() < 16) cert.witnesses.push_back(w);
    }
    const long double ratio = klab::lt_div(res.lhs, res.rhs).to_real();
    if (ratio > worst) {
      worst = ratio;
      worst_w = w;
    }
  }
  std::size_t equal = 0;
  for (std::size_t k = 1; k <= o.dim; ++k) {
    const auto res = klab::dn_check(klab::SeqVector::unit(k), o.p);
    if (klab::lt_close(res.lhs, res.rhs, 1e-12L)) ++equal;
  }
  cert.constants["max_ratio"] = klab::LogTower::from_real(worst);
  cert.constants["unit_equalities"] = klab::LogTower::from_real(static_cast<long double>(equal));
  if (failures == 0 && equal == o.dim) {
    cert.status = klab::Status::verified_to_depth;
    if (worst_w) cert.witnesses.push_back(*worst_w);
    cert.notes = "worst sample listed; equality on every e_k";
  } else if (failures > 0) {
    cert.status = klab::Status::candidate_refutation;
    cert.notes = std::to_string(failures) + " samples violate the inequality";
  } else {
    cert.status = klab::Status::inconclusive;
    cert.notes = "equality failed on " + std::to_string(o.dim - equal) + " coordinate vectors";
  }
  return certificate_outcome(cert);
}

Outcome run_gen_hadamard(const Options& o, Json& config) {
  const std::size_t K = rows_or(o, 100);
  auto d = parse_schedule(o.d, K);
  config.update({{"d", d}, {"K", K}});
  const auto sys = klab::hadamard_system(d, K);
  Json out = klab::to_json(sys);
  out["gram_defect"] = sys.gram_defect();
  return {out, 0, std::nullopt};
}

Outcome run_gen_tower(const Options& o, Json& config) {
  const std::size_t K = rows_or(o, 8);
  config.update({{"K", K}, {"J", o.J}});
  Json out = klab::to_json(klab::tower_system(K, o.J));
  out["sha256"] = sha256_hex(out.dump());
  return {out, 0, std::nullopt};
}

Outcome run_build_bk(const Options& o, Json& config) {
  const auto a = parse_reals(o.input);
  config.update({{"input", a}, {"k0", o.k0}});
  if (o.C) config["C"] = *o.C;
  const auto res = klab::build_bk(a, o.k0, o.C);
  const bool ok = klab::bk_bounds_hold(a, res.b, res.C);
  std::ostringstream csv;
  csv << "k,a,b\n";
  for (std::size_t k = 0; k < a.size(); ++k) csv << k + 1 << ',' << klab::format_double(a[k]) << ',' << res.b[k] << '\n';
  return {Json{{"b", res.b}, {"C", res.C}, {"k0", res.k0}, {"bounds_hold", ok}}, ok ? 0 : 3, csv.str()};
}

Outcome run_partition(const Options& o, Json& config) {
  std::vector<klab::SeqVector> gens;
  std::size_t n = o.n;
  for (const auto& g : split(o.generators, ';')) {
    std::vector<klab::Complex> v;
    for (const auto& t : split(g, ',')) v.push_back(parse_complex(t));
    n = std::max(n, v.size());
    gens.push_back(klab::SeqVector::from_dense(v));
  }
  if (gens.empty()) throw UsageError("--generators needs at least one generator");
  config.update({{"generators", o.generators}, {"n", n}});
  if (o.tolerance) config["tolerance"] = *o.tolerance;
  const auto part = klab::partition_from_generators(gens, n, {o.tolerance});
  const auto nf = klab::normal_form(part, klab::power_matrix());
  Json out{{"partition", klab::to_json(part)}, {"n", *nf.n}, {"sigma", *nf.sigma}};
  return {out, 0, std::nullopt};
}

Outcome run_norm_table(const Options& o, Json& config) {
  const auto sys = load_system(o, o.Q);
  config.update({{"system", sys.descriptor}, {"K", sys.K}, {"Q", o.Q}});
  if (sys.tower) config["J"] = o.J;
  std::ostringstream csv;
  klab::write_norm_table_csv(csv, sys.rows, sys.K, o.Q);
  Json rows = Json::array();
  for (std::size_t k = 1; k <= sys.K; ++k) {
    Json r = Json::array();
    for (unsigned q = 0; q <= o.Q; ++q) r.push_back(sys.rows(k, q).to_string());
    rows.push_back(std::move(r));
  }
  return {Json{{"rows", std::move(rows)}}, 0, csv.str()};
}

Outcome run_level_set_limit(const Options& o, Json& config) {
  std::vector<klab::Complex> v;
  for (const auto& t : split(o.xi, ',')) v.push_back(parse_complex(t));
  config.update({{"xi", o.xi}, {"q", o.q}, {"steps", o.steps}});
  const auto xi = klab::SeqVector::from_dense(v);
  if (xi.empty()) throw UsageError("--xi must have a nonzero entry");
  const auto levels = klab::level_sets(v);
  const auto dist = klab::level_set_limit(xi, o.q, o.steps);
  Json d = Json::array();
  std::ostringstream csv;
  csv << "n,distance\n";
  for (std::size_t i = 0; i < dist.size(); ++i) {
    d.push_back(dist[i].to_string());
    csv << i + 1 << ',' << dist[i].to_string() << '\n';
  }
  return {Json{{"M1", levels.front()}, {"level_sets", levels}, {"distance", std::move(d)}}, 0, csv.str()};
}

void emit(const Options& o, const std::string& command, Json config, const Outcome& out) {
  std::string text;
  if (o.format == "csv") {
    if (!out.csv) throw UsageError("command '" + command + "' has no CSV form");
    text = *out.csv;
  } else {
    config["seed"] = o.seed;
    config["format"] = o.format;
    Json report{{"tool", "koethe-lab"},
                {"version", KLAB_VERSION},
                {"command", command},
                {"config", std::move(config)},
                {"content_hash", sha256_hex(out.result.dump())},
                {"result", out.result}};
    text = report.dump(2) + "\n";
  }
  if (o.output.empty() || o.output == "-") {
    std::cout << text;
  } else {
    std::ofstream f(o.output, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + o.output + "'");
    f << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Köthe algebra certificate laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", KLAB_VERSION);
  app.add_option("-o,--output", o.output, "Report path (stdout when omitted)");
  app.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", o.seed, "Seed for randomized runs");

  using Runner = Outcome (*)(const Options&, Json&);
  std::vector<std::pair<CLI::App*, std::pair<std::string, Runner>>> commands;
  auto add = [&](CLI::App* sub, std::string name, Runner fn) { commands.push_back({sub, {std::move(name), fn}}); };

  auto system_opts = [&](CLI::App* c) {
    c->add_option("--system", o.system, "hadamard, tower, power:n1,n2,..., file:path");
    c->add_option("--d", o.d, "Hadamard block schedule: linear or d1,d2,...");
    c->add_option("--norm", o.norm, "Row norm for orthonormal systems: sup or l2");
    c->add_option("--K", o.K, "Number of rows");
    c->add_option("--J", o.J, "Tower depth");
  };

  auto* check = app.add_subcommand("check", "Run a certificate check");
  check->require_subcommand(1);

  auto* gp = check->add_subcommand("gp", "Grothendieck-Pietsch nuclearity at finite depth");
  gp->add_option("--matrix", o.matrix, "power, scaled:S, exp:B, power:n1,n2,...");
  gp->add_option("--q", o.q);
  gp->add_option("--r", o.r);
  gp->add_option("--depth", o.depth, "Summation depth; 1e6 notation accepted")
      ->transform(
          [](std::string v) {
            double x = 0;
            const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc{} || end != v.data() + v.size() || x < 1 || x != std::floor(x) || x > 1e12) {
              throw CLI::ValidationError("must be a positive integer");
            }
            return std::to_string(static_cast<std::uint64_t>(x));
          },
          "INT");
  gp->add_option("--tail", o.tail, "auto, integral or geometric");
  add(gp, "check gp", run_gp);

  auto* ab = check->add_subcommand("alpha-beta", "Conditions (alpha) and (beta) for two matrices or an embedding search");
  ab->add_option("--a", o.matrix);
  ab->add_option("--b", o.matrix_b);
  ab->add_option("--Q", o.Q);
  ab->add_option("--R", o.R);
  ab->add_option("--C", o.C, "Fixed constant for the n_k construction");
  ab->add_flag("--search", o.search, "Search an embedding of --system into (n_k^q)");
  system_opts(ab);
  add(ab, "check alpha-beta", run_alpha_beta);

  auto* iv = check->add_subcommand("condition-iv", "Condition (iv) on a row system");
  system_opts(iv);
  iv->add_option("--P", o.P);
  iv->add_option("--Q", o.Q);
  iv->add_option("--R", o.R);
  iv->add_flag("--search", o.search, "Generic quantifier search instead of the closed-form report");
  add(iv, "check condition-iv", run_condition_iv);

  auto* dn = check->add_subcommand("dn", "Dominating-norm inequality on random truncated vectors");
  dn->add_option("--p", o.p);
  dn->add_option("--count", o.count);
  dn->add_option("--dim", o.dim);
  dn->add_option("--nnz", o.nnz);
  add(dn, "check dn", run_dn);

  auto* gen = app.add_subcommand("gen", "Generate an example system");
  gen->require_subcommand(1);
  auto* gh = gen->add_subcommand("hadamard", "Block Hadamard orthonormal rows");
  gh->add_option("--d", o.d);
  gh->add_option("--K", o.K);
  add(gh, "gen hadamard", run_gen_hadamard);
  auto* gt = gen->add_subcommand("tower", "Prime tower system");
  gt->add_option("--K", o.K);
  gt->add_option("--J", o.J);
  add(gt, "gen tower", run_gen_tower);

  auto* build = app.add_subcommand("build", "Constructive lemmas");
  build->require_subcommand(1);
  auto* bk = build->add_subcommand("bk", "Integer sequence b_k between a_k / C and C a_k^2");
  bk->add_option("--input", o.input, "a_1,a_2,...")->required();
  bk->add_option("--k0", o.k0);
  bk->add_option("--C", o.C);
  add(bk, "build bk", run_build_bk);

  auto* part = app.add_subcommand("partition", "Index partition of a generator family");
  part->add_option("--generators", o.generators, "Dense generators separated by ';', entries re or re:im")->required();
  part->add_option("--n", o.n, "Ambient length");
  part->add_option("--tolerance", o.tolerance);
  add(part, "partition", run_partition);

  auto* nt = app.add_subcommand("norm-table", "Tabulate rows(k, q)");
  system_opts(nt);
  nt->add_option("--Q", o.Q);
  add(nt, "norm-table", run_norm_table);

  auto* demo = app.add_subcommand("demo", "Demonstrations");
  demo->require_subcommand(1);
  auto* lsl = demo->add_subcommand("level-set-limit", "Sup distance from x_n to e_{M_1}");
  lsl->add_option("--xi", o.xi, "Entries re or re:im");
  lsl->add_option("--q", o.q);
  lsl->add_option("--steps", o.steps);
  add(lsl, "demo level-set-limit", run_level_set_limit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  for (const auto& [sub, entry] : commands) {
    if (!sub->parsed()) continue;
    try {
      Json config = Json::object();
      const Outcome out = entry.second(o, config);
      emit(o, entry.first, std::move(config), out);
      return out.exit;
    } catch (const UsageError& e) {
      std::cerr << "koethe-lab: " << e.what() << '\n';
      return kUsageError;
    } catch (const std::domain_error& e) {
      std::cerr << "koethe-lab: " << e.what() << '\n';
      return kUsageError;
    } catch (const std::invalid_argument& e) {
      std::cerr << "koethe-lab: " << e.what() << '\n';
      return kUsageError;
    } catch (const std::exception& e) {
      std::cerr << "koethe-lab: error: " << e.what() << '\n';
      return kUsageError;
    }
  }
  std::cerr << "koethe-lab: no command given\n";
  return kUsageError;
}
