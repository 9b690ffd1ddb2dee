#include "dphase/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/core.h>

#include "dphase/field_io.hpp"

namespace dphase {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

bool violates(double lhs, double rhs, double tol) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return lhs - rhs > tol * scale;
}

std::string format_point(const Point& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? " " : "") + format_double(x[i]);
  return s + ")";
}

std::string format_matrix(const GradientMatrix& z) {
  std::string s = "[";
  for (int a = 0; a < z.rows(); ++a) {
    if (a) s += "; ";
    for (int i = 0; i < z.cols(); ++i) s += (i ? " " : "") + format_double(z(a, i));
  }
  return s + "]";
}

void ConditionReport::add_detail(std::string key, double value) {
  details.emplace_back(std::move(key), format_double(value));
}

std::string ConditionReport::to_text() const {
  std::ostringstream os;
  os << "condition: " << condition << '\n';
  os << "verdict: " << (passed() ? "pass-on-samples" : "fail") << '\n';
  os << "samples: " << samples << '\n';
  os << "seed: " << seed << '\n';
  for (const auto& [k, v] : details) os << k << ": " << v << '\n';
  if (witness) {
    os << "witness.relation: " << witness->relation << '\n';
    os << "witness.x: " << format_point(witness->x) << '\n';
    if (!witness->x_tilde.empty()) os << "witness.x_tilde: " << format_point(witness->x_tilde) << '\n';
    if (witness->z) os << "witness.z: " << format_matrix(*witness->z) << '\n';
    os << "witness.lhs: " << format_double(witness->lhs) << '\n';
    os << "witness.rhs: " << format_double(witness->rhs) << '\n';
  }
  return os.str();
}

std::string ConditionReport::csv_header() {
  return "condition,verdict,samples,seed,relation,x,x_tilde,z,lhs,rhs";
}

std::string ConditionReport::to_csv_row() const {
  std::string row = csv_escape(condition) + ',' + (passed() ? "pass-on-samples" : "fail") + ',' +
                    std::to_string(samples) + ',' + std::to_string(seed);
  if (witness) {
    row += ',' + csv_escape(witness->relation) + ',' + csv_escape(format_point(witness->x)) + ',' +
           csv_escape(witness->x_tilde.empty() ? "" : format_point(witness->x_tilde)) + ',' +
           csv_escape(witness->z ? format_matrix(*witness->z) : "") + ',' + format_double(witness->lhs) +
           ',' + format_double(witness->rhs);
  } else {
    row += ",,,,,,";
  }
  return row;
}

}  // namespace dphase
