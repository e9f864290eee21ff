#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sense {

/// Shape of the periodic drive h(t). DeltaKick treats h1 as the accumulated
/// rotation angle of one kick (integral of h(t) over a period); SquarePulse
/// treats h1 as a field amplitude acting for a window of width w per period.
struct PulseShape {
  enum class Kind { DeltaKick, SquarePulse };
  Kind kind = Kind::DeltaKick;
  double width = 0.0;  // pulse width w, only meaningful for SquarePulse

  static PulseShape delta_kick() { return {Kind::DeltaKick, 0.0}; }
  static PulseShape square(double w) { return {Kind::SquarePulse, w}; }
  bool is_delta() const { return kind == Kind::DeltaKick; }
};

/// Parameters of the kicked transverse-field Ising chain,
///   H(t) = -J sum sx_i sx_{i+1} - (h0 + h(t)) sum sz_i,   periodic boundaries.
/// J sets the energy unit; tau is the drive period.
struct ModelParams {
  double J = 1.0;
  double h0 = 0.0;
  double h1 = 0.0;
  double tau = 0.2;
  int N = 2000;
  PulseShape pulse = PulseShape::delta_kick();
  // The long-time steady state is guaranteed away from infinite temperature
  // only for J*tau <= 1; set this to probe beyond that regime anyway.
  bool allow_long_period = false;
};

struct InvalidParams : std::runtime_error {
  std::vector<std::string> violations;
  explicit InvalidParams(std::vector<std::string> v);
};

/// Proof-of-validation wrapper: operations take ValidatedParams so that the
/// invariants below cannot be bypassed.
class ValidatedParams {
 public:
  const ModelParams& get() const { return p_; }
  const ModelParams* operator->() const { return &p_; }

 private:
  friend ValidatedParams validate(const ModelParams&);
  explicit ValidatedParams(ModelParams p) : p_(p) {}
  ModelParams p_;
};

/// Checks J > 0, tau > 0, N even and >= 2, pulse width in (0, tau], and
/// J*tau <= 1 unless overridden. Throws InvalidParams listing every violation.
ValidatedParams validate(const ModelParams& p);
inline ValidatedParams validate(const ValidatedParams& p) { return validate(p.get()); }

/// Returns a copy with a different drive amplitude (used by finite-difference
/// derivatives in h1).
ValidatedParams with_h1(const ValidatedParams& p, double h1);

/// Quasi-momenta of the even-parity (antiperiodic) fermion sector:
/// k = pi/N, 3pi/N, ..., (N-1)pi/N; exactly N/2 values, ascending.
std::vector<double> kgrid(int N);

/// Initial state of the chain before the drive is switched on.
struct InitialState {
  enum class Kind { PolarizedUp, GroundStateOfH0, ThermalOfH0 };
  Kind kind = Kind::PolarizedUp;
  double beta = 0.0;               // inverse temperature, ThermalOfH0 only
  std::optional<double> h0_gs;     // field at which the ground state is taken
                                   // (defaults to the run's h0)

  static InitialState polarized_up() { return {}; }
  static InitialState ground_state(std::optional<double> at_h0 = std::nullopt) {
    return {Kind::GroundStateOfH0, 0.0, at_h0};
  }
  static InitialState thermal(double beta) { return {Kind::ThermalOfH0, beta, std::nullopt}; }
};

/// Block of L contiguous sites; explicit 2^L reconstruction is only allowed
/// up to explicit_cap.
struct BlockSpec {
  int L = 1;
  int explicit_cap = 12;
};

void validate_block(const BlockSpec& b, int N);

}  // namespace sense
