#include "sense/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace sense {

namespace {
std::string join(const std::vector<std::string>& v) {
  std::ostringstream os;
  os << "invalid parameters:";
  for (const auto& s : v) os << " [" << s << "]";
  return os.str();
}
}  // namespace

InvalidParams::InvalidParams(std::vector<std::string> v)
    : std::runtime_error(join(v)), violations(std::move(v)) {}

ValidatedParams validate(const ModelParams& p) {
  std::vector<std::string> bad;
  if (!(p.J > 0)) bad.push_back("J must be > 0");
  if (!(p.tau > 0)) bad.push_back("tau must be > 0");
  if (p.N < 2) bad.push_back("N must be >= 2");
  if (p.N % 2 != 0) bad.push_back("N must be even");
  if (!std::isfinite(p.h0) || !std::isfinite(p.h1)) bad.push_back("fields must be finite");
  if (p.J * p.tau > 1.0 + 1e-12 && !p.allow_long_period)
    bad.push_back("J*tau <= 1 required (steady-state regime); set allow_long_period to override");
  if (p.pulse.kind == PulseShape::Kind::SquarePulse) {
    if (!(p.pulse.width > 0) || p.pulse.width > p.tau + 1e-15)
      bad.push_back("square pulse requires 0 < w <= tau");
  }
  if (!bad.empty()) throw InvalidParams(std::move(bad));
  return ValidatedParams(p);
}

ValidatedParams with_h1(const ValidatedParams& p, double h1) {
  ModelParams q = p.get();
  q.h1 = h1;
  return validate(q);
}

std::vector<double> kgrid(int N) {
  std::vector<double> ks(N / 2);
  for (int m = 0; m < N / 2; ++m) ks[m] = std::numbers::pi * (2 * m + 1) / N;
  return ks;
}

void validate_block(const BlockSpec& b, int N) {
  std::vector<std::string> bad;
  if (b.L < 1) bad.push_back("block length must be >= 1");
  if (b.L > N) bad.push_back("block length must be <= N");
  if (b.L > b.explicit_cap) bad.push_back("block length exceeds explicit reconstruction cap");
  if (!bad.empty()) throw InvalidParams(std::move(bad));
}

}  // namespace sense
