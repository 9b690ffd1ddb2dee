#include "dphase/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dphase/cli/config.hpp"
#include "dphase/conditions.hpp"
#include "dphase/convergence.hpp"
#include "dphase/energy.hpp"
#include "dphase/envelope.hpp"
#include "dphase/field_io.hpp"
#include "dphase/lavrentiev.hpp"
#include "dphase/mollifier.hpp"
#include "dphase/test_fields.hpp"
#include "dphase/witnesses.hpp"

namespace dphase::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k;
    auto add = [&](const std::string& section, std::initializer_list<const char*> names) {
      for (const char* n : names) k.insert(section + "." + n);
    };
    add("run", {"seed"});
    add("density", {"name", "p", "q"});
    add("weight", {"kind", "value", "r", "r1", "r2", "sigma", "h", "c0", "c1"});
    add("exponents", {"n", "N", "sigma"});
    add("structure", {"K1", "K2", "K3"});
    add("domain", {"center", "radius"});
    add("sampling", {"budget", "y_budget", "z_min", "z_max", "precheck_budget"});
    add("check", {"x", "eps"});
    add("zsigma", {"scale", "c5", "c6", "budget"});
    add("hprop", {"L", "A", "b", "eps_star", "points", "eps_min", "eps_max"});
    add("grid", {"lower", "upper", "cells"});
    for (const char* s : {"field", "boundary"}) {
      add(s, {"kind", "r", "delta", "A", "b", "seed", "modes", "degree", "path"});
    }
    add("mollify", {"eps", "center", "inner_radius", "outer_radius", "tol", "write_fields"});
    add("convergence", {"center", "inner_radius", "outer_radius", "eps", "eps0", "ratio", "steps",
                        "stop_at_resolution", "energy_tol", "grad_tol", "refine"});
    add("truncate", {"k"});
    add("witness", {"x", "q", "t"});
    add("rival", {"nu1", "nu2", "p_tilde", "q_tilde", "a_tilde", "nu", "beta", "L", "bcm_L", "hh_L", "g"});
    add("scan", {"kind", "start", "step", "count"});
    add("lavrentiev", {"lower", "upper", "meshes", "eps_factor", "max_iterations", "grad_tol", "memory",
                       "gap_tol", "require_decreasing", "reference", "reference_tol"});
    return k;
  }();
  return keys;
}

bool get_bool(const Config& cfg, const std::string& key, bool fallback) {
  if (!cfg.has(key)) return fallback;
  const std::string s = cfg.get_string(key);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  cfg.fail(key, fmt::format("'{}' is not a boolean", s));
}

Point get_point(const Config& cfg, const std::string& key, int n, const Point& fallback) {
  if (!cfg.has(key)) return fallback;
  Point x = cfg.get_list(key);
  if (static_cast<int>(x.size()) != n) cfg.fail(key, fmt::format("expected {} coordinates, got {}", n, x.size()));
  return x;
}

// Runs `build`, turning a library precondition failure into a configuration error at `key`.
template <class F>
auto at_key(const Config& cfg, const std::string& key, F&& build) {
  try {
    return build();
  } catch (const PreconditionError& e) {
    cfg.fail(key, e.what());
  }
}

WeightSpec read_weight(const Config& cfg) {
  const std::string kind = cfg.get_string("weight.kind", "zero");
  return at_key(cfg, "weight.kind", [&] {
    WeightSpec w;
    if (kind == "zero") {
      w = WeightSpec::zero();
    } else if (kind == "constant") {
      w = WeightSpec::constant(cfg.get_double("weight.value"));
    } else if (kind == "holder") {
      w = WeightSpec::holder(cfg.get_double("weight.value"), cfg.get_double("weight.sigma"));
    } else if (kind == "step") {
      w = WeightSpec::step_holder(cfg.get_double("weight.r"), cfg.get_double("weight.sigma"),
                                  cfg.get_double("weight.h"));
    } else if (kind == "two_threshold") {
      w = WeightSpec::two_threshold(cfg.get_double("weight.r1"), cfg.get_double("weight.r2"),
                                    cfg.get_double("weight.sigma"), cfg.get_double("weight.h"));
    } else if (kind == "affine") {
      w = WeightSpec::affine_x1(cfg.get_double("weight.c0"), cfg.get_double("weight.c1"));
    } else {
      cfg.fail("weight.kind", fmt::format("unknown weight '{}' (zero, constant, holder, step, two_threshold, affine)", kind));
    }
    w.validate();
    return w;
  });
}

// Everything a command may need about the density, read once.
struct Problem {
  DensitySpec f;
  ExponentConfig exps;
  Ball domain;
  StructureConstants c;
};

Problem read_problem(const Config& cfg) {
  const std::string name = cfg.get_string("density.name");
  const double p = cfg.get_double("density.p");
  const double q = cfg.get_double("density.q", p);
  Problem pr;
  bool product = false;
  if (name == "zhikov") {
    pr.f = Zhikov{p, q, read_weight(cfg)};
    product = true;
  } else if (name == "example1") {
    pr.f = Example1{p, q, read_weight(cfg)};
    product = true;
  } else if (name == "example2") {
    pr.f = Example2{p, q};
  } else if (name == "power") {
    pr.f = PPower{p};
  } else {
    cfg.fail("density.name", fmt::format("unknown density '{}' (zhikov, example1, example2, power)", name));
  }
  const WeightSpec* w = product_weight(pr.f);
  pr.exps.p = p;
  pr.exps.q = q;
  pr.exps.n = cfg.get_int("exponents.n", 2);
  pr.exps.N = cfg.get_int("exponents.N", 1);
  pr.exps.sigma = cfg.get_double("exponents.sigma", product ? w->sigma : 1.0);
  if (pr.exps.n < 2 || pr.exps.n > kMaxDim) cfg.fail("exponents.n", "n must be 2 or 3");
  if (pr.exps.N < 1 || pr.exps.N > kMaxTargetDim) cfg.fail("exponents.N", "N must be between 1 and 3");

  const Point origin(static_cast<std::size_t>(pr.exps.n), 0.0);
  pr.domain = Ball(get_point(cfg, "domain.center", pr.exps.n, origin), cfg.get_double("domain.radius", 1.0));
  if (!(pr.domain.radius > 0.0)) cfg.fail("domain.radius", "radius must be positive");

  // Default constants: Z^sigma constants of the weight for product densities, (1, 0, R^q) for Example 2.
  pr.c.exponents = pr.exps;
  if (product && (w->kind == WeightSpec::Kind::step_holder || w->kind == WeightSpec::Kind::two_threshold)) {
    const ZsigmaConstants z = ZsigmaConstants::for_weight(*w);
    pr.c.K1 = z.c6;
    pr.c.K2 = z.c5;
  } else if (std::holds_alternative<Example2>(pr.f)) {
    pr.c.K3 = std::pow(pr.domain.radius, q);
  }
  pr.c.K1 = cfg.get_double("structure.K1", pr.c.K1);
  pr.c.K2 = cfg.get_double("structure.K2", pr.c.K2);
  pr.c.K3 = cfg.get_double("structure.K3", pr.c.K3);
  return pr;
}

void validate_structure(const Config& cfg, const Problem& pr) {
  at_key(cfg, "density.p", [&] {
    pr.c.validate();
    return 0;
  });
}

SamplerConfig read_sampler(const Config& cfg, std::uint64_t seed) {
  SamplerConfig s;
  const int budget = cfg.get_int("sampling.budget", 10000);
  if (budget < 1) cfg.fail("sampling.budget", "budget must be positive");
  s.budget = static_cast<std::size_t>(budget);
  s.seed = seed;
  s.z_min = cfg.get_double("sampling.z_min", s.z_min);
  s.z_max = cfg.get_double("sampling.z_max", s.z_max);
  if (!(s.z_min > 0.0 && s.z_max > s.z_min)) cfg.fail("sampling.z_min", "need 0 < z_min < z_max");
  return s;
}

std::size_t read_y_budget(const Config& cfg) {
  const int b = cfg.get_int("sampling.y_budget", 256);
  if (b < 1) cfg.fail("sampling.y_budget", "budget must be positive");
  return static_cast<std::size_t>(b);
}

Grid read_grid(const Config& cfg, int n) {
  const double lo = cfg.get_double("grid.lower", -1.0);
  const double hi = cfg.get_double("grid.upper", 1.0);
  const int cells = cfg.get_int("grid.cells", 256);
  if (!(hi > lo) || cells < 2) cfg.fail("grid.cells", "need upper > lower and at least 2 cells");
  return Grid::cube(n, lo, hi, cells);
}

// A field is either a formula (sampled on demand) or a CSV file on a known grid.
struct FieldSource {
  std::optional<FieldFunction> formula;
  std::string path;
  std::string description;
};

FieldSource read_field(const Config& cfg, const std::string& section, const Problem& pr, std::uint64_t seed) {
  const int n = pr.exps.n;
  const int N = pr.exps.N;
  const std::string kind_key = section + ".kind";
  const std::string kind = cfg.get_string(kind_key);
  FieldSource src;
  src.description = kind;
  if (kind == "kinked") {
    const double r = cfg.get_double(section + ".r", 0.0);
    const double delta = cfg.get_double(section + ".delta", 0.5);
    if (!(delta > 0.0)) cfg.fail(section + ".delta", "delta must be positive");
    src.formula = kinked_field(N, r, delta);
    src.description = fmt::format("kinked r={} delta={}", r, delta);
  } else if (kind == "affine") {
    const auto A = cfg.get_list(section + ".A");
    const auto b = cfg.get_list(section + ".b", std::vector<double>(static_cast<std::size_t>(N), 0.0));
    if (static_cast<int>(A.size()) != N * n) cfg.fail(section + ".A", fmt::format("expected N*n = {} entries", N * n));
    if (static_cast<int>(b.size()) != N) cfg.fail(section + ".b", fmt::format("expected N = {} entries", N));
    src.formula = affine_field(N, n, A, b);
    src.description = "affine";
  } else if (kind == "random") {
    const std::uint64_t s = cfg.get_u64(section + ".seed", seed);
    const int modes = cfg.get_int(section + ".modes", 4);
    if (modes < 1) cfg.fail(section + ".modes", "need at least one mode");
    src.formula = random_smooth_field(N, n, s, modes);
    src.description = fmt::format("random seed={} modes={}", s, modes);
  } else if (kind == "harmonic") {
    if (N != 1 || n != 2) cfg.fail(kind_key, "harmonic fields need n = 2 and N = 1");
    const int d = cfg.get_int(section + ".degree", 4);
    if (d < 1) cfg.fail(section + ".degree", "degree must be positive");
    src.formula = harmonic_polynomial(d);
    src.description = fmt::format("harmonic degree={}", d);
  } else if (kind == "csv") {
    const std::string rel = cfg.get_string(section + ".path");
    const fs::path p = fs::path(cfg.source()).parent_path() / rel;
    src.path = p.string();
    src.description = fmt::format("csv {}", rel);
  } else {
    cfg.fail(kind_key, fmt::format("unknown field '{}' (kinked, affine, random, harmonic, csv)", kind));
  }
  return src;
}

SampledField sample_field(const Config& cfg, const std::string& section, const FieldSource& src, const Grid& grid,
                          int N) {
  if (src.formula) return SampledField::sample(grid, N, *src.formula);
  std::ifstream in(src.path);
  if (!in) cfg.fail(section + ".path", fmt::format("cannot open '{}'", src.path));
  return at_key(cfg, section + ".path", [&] { return read_field_csv(in, grid, N); });
}

class Run {
 public:
  Run(const Config& cfg, const Options& opts, std::uint64_t seed, std::string command, std::ostream& out)
      : cfg_(cfg), opts_(opts), seed_(seed), command_(std::move(command)), out_(out) {}

  const Config& cfg() const { return cfg_; }
  const Options& opts() const { return opts_; }
  std::uint64_t seed() const { return seed_; }
  std::ostream& out() const { return out_; }

  std::vector<std::string> metadata() const {
    return {fmt::format("command: {}", command_),
            fmt::format("config: {}", fs::path(cfg_.source()).filename().string()),
            fmt::format("config_sha256: {}", cfg_.digest()), fmt::format("seed: {}", seed_)};
  }
  std::string header() const {
    std::string s;
    for (const auto& m : metadata()) s += "# " + m + '\n';
    return s;
  }

  void write(const std::string& name, const std::string& content) const {
    const fs::path p = fs::path(opts_.out_dir) / name;
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw UsageError(fmt::format("cannot write '{}'", p.string()));
    os << content;
  }

 private:
  const Config& cfg_;
  const Options& opts_;
  std::uint64_t seed_;
  std::string command_;
  std::ostream& out_;
};

// Writes report.txt, report.csv and, on failure, witness.txt with the first failing report.
int emit_reports(const Run& run, const std::vector<ConditionReport>& reports) {
  std::string text = run.header();
  std::string csv = run.header() + ConditionReport::csv_header() + '\n';
  const ConditionReport* failed = nullptr;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    if (k) text += '\n';
    text += reports[k].to_text();
    csv += reports[k].to_csv_row() + '\n';
    if (!failed && !reports[k].passed()) failed = &reports[k];
  }
  run.write("report.txt", text);
  run.write("report.csv", csv);
  if (failed) {
    run.write("witness.txt", run.header() + failed->to_text());
    if (failed->witness) {
      run.out() << fmt::format("{}: fail ({}: lhs {} exceeds rhs {})\n", failed->condition, failed->witness->relation,
                               format_double(failed->witness->lhs), format_double(failed->witness->rhs));
    } else {
      run.out() << failed->condition << ": fail\n";
    }
    return kExitFail;
  }
  std::size_t samples = 0;
  for (const auto& r : reports) samples += r.samples;
  run.out() << fmt::format("{}: pass-on-samples ({} samples in {} report(s))\n",
                           reports.empty() ? "" : reports.front().condition, samples, reports.size());
  return kExitPass;
}

ConditionReport f1_report(const ExponentConfig& e) {
  ConditionReport rep;
  rep.condition = "F1";
  rep.samples = 1;
  const double margin = f1_margin(e);
  if (margin < 0.0) {
    rep.verdict = Verdict::fail;
    rep.witness = Witness{"q <= p (1 + sigma / n)", {}, {}, std::nullopt, e.q, e.p * (1.0 + e.sigma / e.n)};
  }
  rep.add_detail("p", e.p);
  rep.add_detail("q", e.q);
  rep.add_detail("n", static_cast<double>(e.n));
  rep.add_detail("sigma", e.sigma);
  rep.add_detail("margin", margin);
  return rep;
}

std::vector<ConditionReport> hprop_reports(const Run& run, const Problem& pr) {
  const Config& cfg = run.cfg();
  validate_structure(cfg, pr);
  const double L = cfg.get_double("hprop.L", 10.0);
  const double eps_star = cfg.get_double("hprop.eps_star", 0.5);
  HPropertyParams params =
      at_key(cfg, "hprop.L", [&] { return HPropertyParams::from_structure(pr.c, L, eps_star); });
  params.A = cfg.get_double("hprop.A", params.A);
  params.b = cfg.get_double("hprop.b", params.b);
  at_key(cfg, "hprop.A", [&] {
    params.validate();
    return 0;
  });
  const int points = cfg.get_int("hprop.points", 20);
  const double eps_min = cfg.get_double("hprop.eps_min", 0.05);
  const double eps_max = cfg.get_double("hprop.eps_max", 0.9 * eps_star);
  if (points < 1) cfg.fail("hprop.points", "need at least one point");
  if (!(eps_min > 0.0 && eps_min <= eps_max && eps_max < eps_star)) {
    cfg.fail("hprop.eps_min", "need 0 < eps_min <= eps_max < eps_star");
  }
  if (!(eps_max < pr.domain.radius)) cfg.fail("hprop.eps_max", "eps_max must be below the domain radius");
  const SamplerConfig zs = read_sampler(cfg, run.seed());
  const std::size_t y_budget = read_y_budget(cfg);

  // (x, eps) pairs from a lattice in [0,1)^{n+1}: eps first, then x in the ball where B(x, eps) fits.
  const int n = pr.exps.n;
  LatticeSequence seq(n + 1, run.seed() ^ 0x5eed5eedULL);
  std::vector<double> u(static_cast<std::size_t>(n + 1));
  std::vector<ConditionReport> out;
  for (int k = 0; k < points; ++k) {
    seq.next(u);
    const double eps = eps_min + (eps_max - eps_min) * u[0];
    const Ball centers(pr.domain.center, (pr.domain.radius - eps) * (1.0 - 1e-6));
    const Point x = map_to_ball(std::span<const double>(u).subspan(1), centers);
    out.push_back(check_H_property(pr.f, params, pr.c, x, eps, pr.domain, zs, y_budget));
    out.back().add_detail("x", format_point(x));
  }
  return out;
}

int cmd_check(const Run& run, const std::string& which) {
  const Config& cfg = run.cfg();
  if (which == "zsigma") {
    const WeightSpec w = read_weight(cfg);
    ZsigmaConstants c = at_key(cfg, "weight.kind", [&] { return ZsigmaConstants::for_weight(w); });
    const double scale = cfg.get_double("zsigma.scale", 1.0);
    c.c5 = cfg.get_double("zsigma.c5", c.c5 * scale);
    c.c6 = cfg.get_double("zsigma.c6", c.c6 * scale);
    at_key(cfg, "zsigma.scale", [&] {
      c.validate();
      return 0;
    });
    const int n_dim = cfg.get_int("exponents.n", 2);
    if (n_dim < 2 || n_dim > kMaxDim) cfg.fail("exponents.n", "n must be 2 or 3");
    const Point origin(static_cast<std::size_t>(n_dim), 0.0);
    const Ball domain(get_point(cfg, "domain.center", n_dim, origin),
                      cfg.get_double("domain.radius", 1.0));
    SamplerConfig s = read_sampler(cfg, run.seed());
    const int budget = cfg.get_int("zsigma.budget", static_cast<int>(s.budget));
    if (budget < 1) cfg.fail("zsigma.budget", "budget must be positive");
    s.budget = static_cast<std::size_t>(budget);
    ConditionReport rep = check_Zsigma(w, c, domain, s);
    rep.add_detail("scale", scale);
    return emit_reports(run, {rep});
  }

  const Problem pr = read_problem(cfg);
  if (which == "f1") {
    at_key(cfg, "density.p", [&] {
      pr.exps.validate();
      return 0;
    });
    return emit_reports(run, {f1_report(pr.exps)});
  }
  if (which == "f2") {
    validate_structure(cfg, pr);
    return emit_reports(run, {check_F2_sampled(pr.f, pr.c, pr.domain, read_sampler(cfg, run.seed()))});
  }
  const Point x = get_point(cfg, "check.x", pr.exps.n, pr.domain.center);
  if (which == "f3") {
    return emit_reports(run, {check_convexity_sampled(pr.f, x, pr.exps.N, read_sampler(cfg, run.seed()))});
  }
  if (which == "f4") {
    const double eps = cfg.get_double("check.eps", 0.25 * pr.domain.radius);
    MinPointResult mp = at_key(cfg, "check.eps", [&] {
      return find_min_point_F4(pr.f, x, eps, pr.domain, read_y_budget(cfg), pr.exps.N, read_sampler(cfg, run.seed()));
    });
    return emit_reports(run, {mp.report});
  }
  return emit_reports(run, hprop_reports(run, pr));
}

ConvergenceSetup read_convergence(const Config& cfg, const Problem& pr) {
  ConvergenceSetup s;
  const Point center = get_point(cfg, "convergence.center", pr.exps.n, pr.domain.center);
  s.inner = Ball(center, cfg.get_double("convergence.inner_radius"));
  s.outer_radius = cfg.get_double("convergence.outer_radius");
  if (!(s.inner.radius > 0.0 && s.outer_radius > s.inner.radius)) {
    cfg.fail("convergence.outer_radius", "need 0 < inner_radius < outer_radius");
  }
  s.eps = cfg.get_list("convergence.eps", {});
  s.eps0 = cfg.get_double("convergence.eps0", 0.0);
  s.ratio = cfg.get_double("convergence.ratio", s.ratio);
  s.steps = cfg.get_int("convergence.steps", s.steps);
  s.stop_at_resolution = get_bool(cfg, "convergence.stop_at_resolution", s.stop_at_resolution);
  s.energy_tol = cfg.get_double("convergence.energy_tol", s.energy_tol);
  s.grad_tol = cfg.get_double("convergence.grad_tol", s.grad_tol);
  s.refine = cfg.get_int("convergence.refine", s.refine);
  if (s.refine < 1) cfg.fail("convergence.refine", "refinement factor must be at least 1");
  return s;
}

int cmd_converge(const Run& run) {
  const Config& cfg = run.cfg();
  const Problem pr = read_problem(cfg);
  validate_structure(cfg, pr);
  const Grid grid = read_grid(cfg, pr.exps.n);
  const ConvergenceSetup setup = read_convergence(cfg, pr);
  const std::string eps_key = cfg.has("convergence.eps") ? "convergence.eps" : "convergence.eps0";
  const auto eps_seq = at_key(cfg, eps_key, [&] { return convergence_eps_sequence(setup, grid.spacing()); });
  const FieldSource src = read_field(cfg, "field", pr, run.seed());

  // Pre-checks of the structure conditions; a failure stops the run unless --force is given.
  const int pre_budget = cfg.get_int("sampling.precheck_budget", 2000);
  if (pre_budget < 1) cfg.fail("sampling.precheck_budget", "budget must be positive");
  SamplerConfig pre = read_sampler(cfg, run.seed());
  pre.budget = static_cast<std::size_t>(pre_budget);
  std::vector<ConditionReport> prechecks;
  prechecks.push_back(f1_report(pr.exps));
  prechecks.push_back(check_F2_sampled(pr.f, pr.c, pr.domain, pre));
  prechecks.push_back(check_convexity_sampled(pr.f, setup.inner.center, pr.exps.N, pre));
  prechecks.push_back(at_key(cfg, "convergence.center", [&] {
    return find_min_point_F4(pr.f, setup.inner.center, eps_seq.front(), pr.domain, read_y_budget(cfg), pr.exps.N, pre)
        .report;
  }));
  std::string pre_text;
  const ConditionReport* pre_failed = nullptr;
  for (const auto& r : prechecks) {
    pre_text += fmt::format("precheck {}: {}\n", r.condition, r.passed() ? "pass-on-samples" : "fail");
    if (!pre_failed && !r.passed()) pre_failed = &r;
  }
  if (pre_failed && !run.opts().force) {
    run.write("report.txt", run.header() + pre_text + "verdict: not run (pre-check failed; use --force)\n");
    run.write("witness.txt", run.header() + pre_failed->to_text());
    run.out() << pre_text << "converge: pre-check failed; rerun with --force to proceed\n";
    return kExitFail;
  }

  const ConvergenceTrace tr = at_key(cfg, "convergence.inner_radius", [&] {
    if (src.formula) return energy_convergence(pr.f, *src.formula, pr.exps.N, grid, setup, pr.c);
    return energy_convergence(pr.f, sample_field(cfg, "field", src, grid, pr.exps.N), setup, pr.c);
  });
  auto meta = run.metadata();
  meta.push_back(fmt::format("field: {}", src.description));
  std::ostringstream csv;
  tr.write_csv(csv, meta);
  run.write("trace.csv", csv.str());
  const std::string summary = pre_text + tr.summary();
  run.write("report.txt", run.header() + summary);
  run.out() << summary;
  if (!tr.passed()) {
    run.write("witness.txt", run.header() + summary);
    return kExitFail;
  }
  return kExitPass;
}

int cmd_mollify(const Run& run) {
  const Config& cfg = run.cfg();
  const Problem pr = read_problem(cfg);
  const Grid grid = read_grid(cfg, pr.exps.n);
  const FieldSource src = read_field(cfg, "field", pr, run.seed());
  const SampledField u = sample_field(cfg, "field", src, grid, pr.exps.N);
  const auto eps_list = cfg.get_list("mollify.eps");
  GradientBoundConfig gb;
  gb.p = pr.exps.p;
  gb.inner = Ball(get_point(cfg, "mollify.center", pr.exps.n, pr.domain.center),
                  cfg.get_double("mollify.inner_radius", 0.5 * pr.domain.radius));
  gb.outer_radius = cfg.get_double("mollify.outer_radius", pr.domain.radius);
  gb.tol = cfg.get_double("mollify.tol", gb.tol);
  const bool write_fields = get_bool(cfg, "mollify.write_fields", true);

  std::string csv = run.header() + fmt::format("# field: {}\n", src.description) +
                    "# columns: eps, c1 = ||Du||_Lp(B_R) ||phi||_Lp', bound c1 eps^(-n/p), max |Du_eps| over "
                    "B_rho, nodes, passed\n"
                    "eps,c1,bound,max_gradient,nodes,passed\n";
  bool all = true;
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    const MollifierSpec m{eps_list[k]};
    const GradientBoundReport r = at_key(cfg, "mollify.eps", [&] { return gradient_bound_check(u, m, gb); });
    all = all && r.passed;
    csv += fmt::format("{},{},{},{},{},{}\n", format_double(r.eps), format_double(r.c1), format_double(r.bound),
                       format_double(r.max_gradient), r.nodes, r.passed ? 1 : 0);
    if (write_fields) {
      const SampledField ue = at_key(cfg, "mollify.eps", [&] { return mollify(u, m); });
      std::ostringstream os;
      auto meta = run.metadata();
      meta.push_back(fmt::format("eps: {}", format_double(m.eps)));
      write_field_csv(os, ue, meta);
      run.write(fmt::format("mollified_{}.csv", k), os.str());
    }
  }
  run.write("bound.csv", csv);
  run.out() << fmt::format("mollify: {} eps value(s), gradient bound {}\n", eps_list.size(), all ? "holds" : "fails");
  if (!all) {
    run.write("witness.txt", csv);
    return kExitFail;
  }
  return kExitPass;
}

int cmd_energy(const Run& run) {
  const Config& cfg = run.cfg();
  const Problem pr = read_problem(cfg);
  const Grid grid = read_grid(cfg, pr.exps.n);
  const FieldSource src = read_field(cfg, "field", pr, run.seed());
  const SampledField u = sample_field(cfg, "field", src, grid, pr.exps.N);
  const double e = at_key(cfg, "domain.radius", [&] { return energy(pr.f, u, pr.domain); });
  const std::string text = fmt::format("density: {}\nfield: {}\nregion: B({}, {})\nenergy: {}\n", density_name(pr.f),
                                       src.description, format_point(pr.domain.center),
                                       format_double(pr.domain.radius), format_double(e));
  run.write("report.txt", run.header() + text);
  run.out() << text;
  return kExitPass;
}

int cmd_truncate(const Run& run) {
  const Config& cfg = run.cfg();
  const Problem pr = read_problem(cfg);
  const Grid grid = read_grid(cfg, pr.exps.n);
  const FieldSource src = read_field(cfg, "field", pr, run.seed());
  const SampledField u = sample_field(cfg, "field", src, grid, pr.exps.N);
  const double k = cfg.get_double("truncate.k");
  if (!(k > 0.0)) cfg.fail("truncate.k", "k must be positive");

  const TruncationContraction tc = check_truncation_contraction(u, k);
  std::string text = fmt::format(
      "field: {}\nk: {}\ninterior_nodes: {}\ndiscrete_violations: {}\nchain_rule_violations: {}\nmax_ratio: {}\n",
      src.description, format_double(k), tc.nodes, tc.discrete_violations, tc.chain_rule_violations,
      format_double(tc.max_ratio));
  bool ok = tc.passed();
  if (pr.exps.N == 1) {
    const EnergySplit split = at_key(cfg, "domain.radius", [&] { return scalar_truncation_energy_split(pr.f, u, k, pr.domain); });
    const GradientField du = discrete_gradient(u);
    const double chain = energy(pr.f, truncation_gradient_field(u, du, k), pr.domain);
    const double diff = std::abs(split.inside + split.outside - chain);
    const bool split_ok = diff <= 1e-9 * std::max(1.0, std::abs(chain));
    ok = ok && split_ok;
    text += fmt::format("split_inside: {}\nsplit_outside: {}\nchain_rule_energy: {}\nsplit_difference: {}\nsplit_ok: {}\n",
                        format_double(split.inside), format_double(split.outside), format_double(chain),
                        format_double(diff), split_ok);
  }
  text += fmt::format("verdict: {}\n", ok ? "pass" : "fail");
  run.write("report.txt", run.header() + text);
  run.out() << text;
  if (!ok) {
    run.write("witness.txt", run.header() + text);
    return kExitFail;
  }
  return kExitPass;
}

RivalStructureSpec read_rival(const Config& cfg, RivalStructureSpec::Kind kind) {
  RivalStructureSpec r;
  r.kind = kind;
  r.nu1 = cfg.get_double("rival.nu1", r.nu1);
  r.nu2 = cfg.get_double("rival.nu2", r.nu2);
  r.p_tilde = cfg.get_double("rival.p_tilde", r.p_tilde);
  r.q_tilde = cfg.get_double("rival.q_tilde", r.q_tilde);
  r.a_tilde = cfg.get_double("rival.a_tilde", r.a_tilde);
  r.nu = cfg.get_double("rival.nu", r.nu);
  r.beta = cfg.get_double("rival.beta", r.beta);
  const double L = cfg.get_double("rival.L", r.L);
  r.L = cfg.get_double(kind == RivalStructureSpec::Kind::hh ? "rival.hh_L" : "rival.bcm_L", L);
  r.g_value = cfg.get_double("rival.g", r.g_value);
  at_key(cfg, "rival.L", [&] {
    r.validate();
    return 0;
  });
  return r;
}

TScan read_scan(const Config& cfg) {
  TScan s;
  const std::string kind = cfg.get_string("scan.kind", "geometric");
  if (kind == "linear") {
    s.kind = TScan::Kind::linear;
  } else if (kind != "geometric") {
    cfg.fail("scan.kind", "scan kind must be linear or geometric");
  }
  s.start = cfg.get_double("scan.start", s.start);
  s.step = cfg.get_double("scan.step", s.step);
  s.count = cfg.get_int("scan.count", s.count);
  at_key(cfg, "scan.kind", [&] { return s.values(); });
  return s;
}

int cmd_witness(const Run& run, const std::string& which) {
  const Config& cfg = run.cfg();
  Transcript tr;
  if (which == "non-product") {
    const double q = cfg.get_double("witness.q", cfg.get_double("density.q", 2.0));
    const double t = cfg.get_double("witness.t", 1.0);
    tr = at_key(cfg, "witness.t", [&] { return witness_non_product(q, t); });
  } else {
    const Problem pr = read_problem(cfg);
    const Point x = get_point(cfg, "witness.x", pr.exps.n, pr.domain.center);
    if (which == "non-uhlenbeck") {
      tr = at_key(cfg, "witness.x", [&] { return witness_non_uhlenbeck(pr.f, x, pr.exps.N); });
    } else {
      const auto kind = which == "bcdfm" ? RivalStructureSpec::Kind::bcdfm
                        : which == "bcm" ? RivalStructureSpec::Kind::bcm
                                         : RivalStructureSpec::Kind::hh;
      const RivalStructureSpec rival = read_rival(cfg, kind);
      const TScan scan = read_scan(cfg);
      tr = at_key(cfg, "witness.x", [&] { return witness_rival_structure_failure(pr.f, x, pr.exps.N, rival, scan); });
    }
  }
  const std::string text = tr.to_text();
  run.write("transcript.txt", run.header() + text);
  run.out() << text;
  return tr.conclusive ? kExitPass : kExitFail;
}

int cmd_lavrentiev(const Run& run) {
  const Config& cfg = run.cfg();
  const Problem pr = read_problem(cfg);
  LavrentievSetup s;
  s.dim = pr.exps.n;
  s.target_dim = pr.exps.N;
  s.lower = cfg.get_double("lavrentiev.lower", s.lower);
  s.upper = cfg.get_double("lavrentiev.upper", s.upper);
  if (!(s.upper > s.lower)) cfg.fail("lavrentiev.upper", "need upper > lower");
  if (cfg.has("lavrentiev.meshes")) {
    s.meshes.clear();
    for (double m : cfg.get_list("lavrentiev.meshes")) {
      if (!(m >= 2.0) || m != std::floor(m)) cfg.fail("lavrentiev.meshes", "mesh sizes must be integers >= 2");
      s.meshes.push_back(static_cast<int>(m));
    }
  }
  s.eps_factor = cfg.get_double("lavrentiev.eps_factor", s.eps_factor);
  s.solver.max_iterations = cfg.get_int("lavrentiev.max_iterations", s.solver.max_iterations);
  s.solver.grad_tol = cfg.get_double("lavrentiev.grad_tol", s.solver.grad_tol);
  s.solver.memory = cfg.get_int("lavrentiev.memory", s.solver.memory);
  const FieldSource src = read_field(cfg, "boundary", pr, run.seed());
  if (!src.formula) cfg.fail("boundary.kind", "the boundary datum must be given by a formula");

  const LavrentievProbeResult res = at_key(cfg, "lavrentiev.meshes", [&] { return lavrentiev_probe(pr.f, *src.formula, s); });

  std::string text = res.summary();
  bool ok = res.all_converged() && res.subclass_consistent();
  if (cfg.has("lavrentiev.gap_tol")) {
    const double tol = cfg.get_double("lavrentiev.gap_tol");
    const bool gap_ok = res.levels.back().rel_gap < tol;
    text += fmt::format("final_rel_gap_below_{}: {}\n", format_double(tol), gap_ok);
    ok = ok && gap_ok;
  }
  if (get_bool(cfg, "lavrentiev.require_decreasing", false)) ok = ok && res.gaps_decreasing();
  if (cfg.has("lavrentiev.reference")) {
    const std::string ref = cfg.get_string("lavrentiev.reference");
    if (ref != "dirichlet") cfg.fail("lavrentiev.reference", "the only reference is 'dirichlet'");
    if (!std::holds_alternative<PPower>(pr.f) || pr.exps.p != 2.0 || cfg.get_string("boundary.kind") != "harmonic" ||
        s.lower != -1.0 || s.upper != 1.0) {
      cfg.fail("lavrentiev.reference", "the Dirichlet reference needs density power p=2, harmonic boundary data, [-1,1]^2");
    }
    const double exact = harmonic_dirichlet_energy(cfg.get_int("boundary.degree", 4));
    const double tol = cfg.get_double("lavrentiev.reference_tol", 0.02);
    bool ref_ok = true;
    for (const auto& l : res.levels) {
      const double ef = std::abs(l.inf_full - exact) / exact;
      const double es = std::abs(l.inf_smooth - exact) / exact;
      ref_ok = ref_ok && ef < tol && es < tol;
      text += fmt::format("level {}: rel_error_full={} rel_error_smooth={}\n", l.cells, format_double(ef),
                          format_double(es));
    }
    text += fmt::format("exact_dirichlet_energy: {}\nreference_ok: {}\n", format_double(exact), ref_ok);
    ok = ok && ref_ok;
  }
  text += fmt::format("verdict: {}\n", ok ? "pass" : "fail");
  auto meta = run.metadata();
  meta.push_back(fmt::format("boundary: {}", src.description));
  std::ostringstream csv;
  res.write_csv(csv, meta);
  run.write("lavrentiev.csv", csv.str());
  run.write("report.txt", run.header() + text);
  run.out() << text;
  if (!ok) {
    run.write("witness.txt", run.header() + text);
    return kExitFail;
  }
  return kExitPass;
}

void prepare_out_dir(const Options& opts) {
  const fs::path dir(opts.out_dir);
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) throw UsageError(fmt::format("'{}' exists and is not a directory", dir.string()));
    if (!fs::is_empty(dir, ec) && !opts.force) {
      throw UsageError(fmt::format("output directory '{}' is not empty; pass --force to overwrite", dir.string()));
    }
  }
  fs::create_directories(dir, ec);
  if (ec) throw UsageError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
}

}  // namespace

const std::vector<CommandInfo>& command_table() {
  static const std::vector<CommandInfo> table{
      {"check", {"f1", "f2", "f3", "f4", "zsigma", "hprop"}, "sampled structure and weight conditions"},
      {"mollify", {}, "mollify a field and check the gradient bound"},
      {"energy", {}, "energy of a field over the domain ball"},
      {"converge", {}, "energy convergence of mollified fields"},
      {"truncate", {}, "vectorial truncation contraction and scalar split"},
      {"witness", {"non-uhlenbeck", "non-product", "bcdfm", "bcm", "hh"}, "counterexample transcripts"},
      {"lavrentiev", {}, "discrete Lavrentiev gap probe"},
  };
  return table;
}

int run_command(const std::vector<std::string>& command, const Options& opts, std::ostream& out, std::ostream& err) {
  try {
    if (command.empty()) throw UsageError("missing subcommand");
    const auto& table = command_table();
    const auto it = std::find_if(table.begin(), table.end(), [&](const CommandInfo& c) { return c.name == command[0]; });
    if (it == table.end()) throw UsageError(fmt::format("unknown subcommand '{}'", command[0]));
    std::string target;
    if (!it->targets.empty()) {
      if (command.size() != 2) throw UsageError(fmt::format("'{}' needs one of: {}", it->name, fmt::join(it->targets, ", ")));
      target = command[1];
      if (std::find(it->targets.begin(), it->targets.end(), target) == it->targets.end()) {
        throw UsageError(fmt::format("unknown {} target '{}'", it->name, target));
      }
    } else if (command.size() != 1) {
      throw UsageError(fmt::format("'{}' takes no target", it->name));
    }
    if (opts.config_path.empty()) throw UsageError("--config is required");

    const Config cfg = Config::load(opts.config_path);
    cfg.require_known(known_keys());
    const std::uint64_t seed = opts.seed ? *opts.seed : cfg.get_u64("run.seed", 1);
    prepare_out_dir(opts);
    const Run run(cfg, opts, seed, target.empty() ? it->name : it->name + " " + target, out);

    if (it->name == "check") return cmd_check(run, target);
    if (it->name == "mollify") return cmd_mollify(run);
    if (it->name == "energy") return cmd_energy(run);
    if (it->name == "converge") return cmd_converge(run);
    if (it->name == "truncate") return cmd_truncate(run);
    if (it->name == "witness") return cmd_witness(run, target);
    return cmd_lavrentiev(run);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace dphase::cli
