#include "dphase/witnesses.hpp"

#include <cmath>

#include <fmt/format.h>

#include "dphase/report.hpp"

namespace dphase {

namespace {

std::string kind_name(RivalStructureSpec::Kind k) {
  switch (k) {
    case RivalStructureSpec::Kind::bcdfm:
      return "bcdfm";
    case RivalStructureSpec::Kind::bcm:
      return "bcm";
    case RivalStructureSpec::Kind::hh:
      return "hh";
  }
  return "?";
}

}  // namespace

void Transcript::add(std::string key, double value) { add(std::move(key), fmt::format("{}", value)); }

std::string Transcript::to_text() const {
  std::string out = fmt::format("witness: {}\nconclusive: {}\n", name, conclusive ? "yes" : "no");
  if (t) out += fmt::format("t: {}\n", *t);
  for (const auto& [k, v] : steps) out += fmt::format("{}: {}\n", k, v);
  out += fmt::format("conclusion: {}\n", conclusion);
  return out;
}

Transcript witness_non_uhlenbeck(const DensitySpec& f, std::span<const double> x, int rows) {
  const int cols = static_cast<int>(x.size());
  const GradientMatrix z = GradientMatrix::unit(rows, cols, 0, cols - 1, 1.0);
  const double fz = eval_density(f, x, z);
  const double fm = eval_density(f, x, -z);
  if (!violates(fz, fm) && !violates(fm, fz)) {
    throw PreconditionError(
        fmt::format("f(x, z) = f(x, -z) = {} at x = {}: no witness here", fz, format_point(Point(x.begin(), x.end()))));
  }
  Transcript tr;
  tr.name = "non-uhlenbeck";
  tr.conclusive = true;
  tr.add("density", density_name(f));
  tr.add("x", format_point(Point(x.begin(), x.end())));
  tr.add("z", format_matrix(z));
  tr.add("|z|", z.norm());
  tr.add("|-z|", (-z).norm());
  tr.add("f(x,z)", fz);
  tr.add("f(x,-z)", fm);
  tr.conclusion = fmt::format("|z| = |-z| but f(x,z) = {} != {} = f(x,-z); f is not of the form g(x,|z|)", fz, fm);
  return tr;
}

void RivalStructureSpec::validate() const {
  switch (kind) {
    case Kind::bcdfm:
      if (!(nu1 > 0.0 && nu2 > 0.0 && p_tilde >= 1.0 && q_tilde >= p_tilde && a_tilde >= 0.0)) {
        throw PreconditionError("bcdfm rival needs nu1, nu2 > 0, 1 <= p~ <= q~, a~ >= 0");
      }
      break;
    case Kind::bcm:
      if (!(nu > 0.0 && nu < 1.0 && beta > 0.0 && beta < 1.0 && L > 1.0 && g_value >= 0.0)) {
        throw PreconditionError("bcm rival needs 0 < nu, beta < 1 < L and g >= 0");
      }
      break;
    case Kind::hh:
      if (!(L >= 1.0)) throw PreconditionError("hh rival needs L >= 1");
      break;
  }
}

std::vector<double> TScan::values() const {
  if (!(start > 0.0) || count < 1) throw PreconditionError("t scan needs start > 0 and count >= 1");
  if (kind == Kind::geometric && !(step > 1.0)) throw PreconditionError("geometric t scan needs factor > 1");
  if (kind == Kind::linear && !(step > 0.0)) throw PreconditionError("linear t scan needs step > 0");
  std::vector<double> out;
  double t = start;
  for (int k = 0; k < count; ++k) {
    out.push_back(t);
    t = kind == Kind::linear ? start + (k + 1) * step : t * step;
  }
  return out;
}

Transcript witness_rival_structure_failure(const DensitySpec& f, std::span<const double> x, int rows,
                                           const RivalStructureSpec& rival, const TScan& scan) {
  rival.validate();
  const int cols = static_cast<int>(x.size());
  const double p = lower_exponent(f);
  Transcript tr;
  tr.name = kind_name(rival.kind);
  tr.add("density", density_name(f));
  tr.add("x", format_point(Point(x.begin(), x.end())));
  const auto ts = scan.values();
  tr.add("scan", fmt::format("{} from {} ({} values)", scan.kind == TScan::Kind::linear ? "linear" : "geometric",
                             scan.start, ts.size()));

  for (double t : ts) {
    double lhs = 0.0;
    double rhs = 0.0;
    std::string relation;
    switch (rival.kind) {
      case RivalStructureSpec::Kind::bcdfm: {
        const double model = std::pow(t, rival.p_tilde) + rival.a_tilde * std::pow(t, rival.q_tilde);
        const double f_first = eval_density(f, x, GradientMatrix::unit(rows, cols, 0, 0, t));
        const double f_last = eval_density(f, x, GradientMatrix::unit(rows, cols, 0, cols - 1, t));
        if (violates(rival.nu1 * model, f_first)) {
          relation = "lower bound along t e_11: nu1 (t^p~ + a~ t^q~) <= f(x, t e_11)";
          lhs = rival.nu1 * model;
          rhs = f_first;
        } else {
          relation = "upper bound along t e_1n: f(x, t e_1n) <= nu2 (t^p~ + a~ t^q~)";
          lhs = f_last;
          rhs = rival.nu2 * model;
        }
        break;
      }
      case RivalStructureSpec::Kind::bcm:
        relation = "f(x, beta t e_1n) <= L (t^p / nu + g)";
        lhs = eval_density(f, x, GradientMatrix::unit(rows, cols, 0, cols - 1, rival.beta * t));
        rhs = rival.L * (std::pow(t, p) / rival.nu + rival.g_value);
        break;
      case RivalStructureSpec::Kind::hh: {
        relation = "|z'| |A(x,z')| <= L A(x,z) : z, z' = t e_1n, z = -z'";
        const GradientMatrix zp = GradientMatrix::unit(rows, cols, 0, cols - 1, t);
        const GradientMatrix z = -zp;
        lhs = zp.norm() * density_gradient(f, x, zp).norm();
        rhs = rival.L * density_gradient(f, x, z).dot(z);
        break;
      }
    }
    if (violates(lhs, rhs)) {
      tr.conclusive = true;
      tr.t = t;
      tr.add("relation", relation);
      tr.add("lhs", lhs);
      tr.add("rhs", rhs);
      tr.conclusion = fmt::format("the {} structure inequality fails at t = {}", tr.name, t);
      return tr;
    }
  }
  tr.conclusive = false;
  tr.conclusion = "inconclusive: no failure in the scanned range; enlarge the scan";
  return tr;
}

Transcript witness_non_product(double q, double t) {
  if (!(q > 1.0)) throw PreconditionError("witness_non_product needs q > 1");
  if (!(t > 0.0)) throw PreconditionError("witness_non_product needs t > 0");
  Transcript tr;
  tr.name = "non-product";
  tr.add("q", q);
  tr.t = t;
  const double g_half = eval_g(t / 2.0, t, q);
  const double g_double = eval_g(2.0 * t, t, q);
  const double g_above = eval_g(2.0 * t, 4.0 * t, q);
  const double g_neg = eval_g(t, -t, q) + eval_g(-t, -t, q) + eval_g(t, 0.0, q);
  tr.add("g(t/2, t)", g_half);
  tr.add("g(2t, t)", g_double);
  tr.add("g(2t, 4t)", g_above);
  tr.add("g(t, -t) + g(-t, -t) + g(t, 0)", g_neg);
  const bool facts = g_half > 0.0 && g_double == 0.0 && g_above > 0.0 && g_neg == 0.0;
  tr.add("step 1", "g(t/2, t) > 0 forces h(t) != 0 if g = a(x_1) h(t)");
  tr.add("step 2", "g(2t, 4t) > 0 forces a(2t) != 0");
  tr.add("step 3", "g(2t, t) = a(2t) h(t) = 0 with a(2t) != 0 forces h(t) = 0");
  tr.conclusive = facts;
  tr.conclusion = facts ? "h(t) != 0 and h(t) = 0 for the same t > 0: g is not of product type"
                        : "probe facts did not hold; no contradiction derived";
  return tr;
}

}  // namespace dphase
