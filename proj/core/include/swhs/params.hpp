#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swhs/rational.hpp"

namespace swhs {

// Which nonnegativity gate applies to the weight powers. The inequality
// itself only needs alpha+beta >= 0; the sharp-constant/extremal theory
// needs each weight nonnegative on its own. Callers pick the gate.
enum class WeightConvention { Sum, Each };

// Parameters of the weighted boundary-to-bulk inequality
//
//   iint |y|^-alpha P(x,y) f(y) g(x) |x|^-beta dx dy
//     <= C ||f||_{L^p(boundary)} ||g||_{L^q'(half space)},
//   P(x,y) = x_n^lambda / (|x'-y|^2 + x_n^2)^(mu/2).
//
// All exponent relations are evaluated in exact rational arithmetic when
// `exact` is set (the default for rational construction); parameters built
// from raw doubles keep exactness of the dyadic values but the admissibility
// gate then allows a 1e-12 slack on the balance equality.
struct InequalityParams {
  int n = 3;
  Rational p{3, 2};
  Rational q_prime{9, 8};
  Rational alpha{0};
  Rational beta{0};
  Rational lambda{0};
  Rational mu{1};
  bool exact = true;

  // Throws std::domain_error on non-finite entries.
  static InequalityParams from_doubles(int n, double p, double q_prime,
                                       double alpha, double beta,
                                       double lambda, double mu);

  // 1/q from the dimension relation
  //   1/q = ((n-1)/n)(1/p) + (alpha+beta+mu-lambda-n+1)/n.
  // Under the balance identity this q is exactly the conjugate of q'.
  Rational inv_q() const;
  // 1/p' from 1/p' = (n/(n-1))(1/q') + (alpha+beta+mu-lambda-n)/(n-1);
  // under the balance identity equal to the conjugate relation 1 - 1/p.
  Rational inv_p_prime() const;

  // Defined only when the corresponding inverse is positive.
  std::optional<Rational> q() const;
  std::optional<Rational> p_prime() const;

  // Signed residual lhs - rhs of the balance identity
  //   ((n-1)/n)(1/p) + 1/q' + (alpha+beta+mu-lambda)/n = (2n-1)/n.
  Rational balance_residual() const;
};

struct Condition {
  std::string name;
  bool holds = false;
  double slack = 0.0;  // sign convention: positive means satisfied with room
};

struct AdmissibilityReport {
  bool admissible = false;
  std::vector<Condition> conditions;
  std::optional<Rational> q;
  std::optional<Rational> p_prime;

  const Condition* find(std::string_view name) const;
};

// One report entry per admissibility condition; verdict true iff all hold.
// Strict inequalities fail at exactly zero slack. The balance equality is
// exact on the rational path and tolerates |slack| <= 1e-12 otherwise.
AdmissibilityReport validate(const InequalityParams& ip,
                             WeightConvention wc = WeightConvention::Sum);

// Exponents of the coupled integral system tied to the inequality's
// Euler-Lagrange equations:
//   u(y) = |y|^-alpha int |x|^-beta  P(x,y) v(x)^q0 dx
//   v(x) = |x|^-beta  int |y|^-alpha P(x,y) u(y)^p0 dy.
struct SystemParams {
  int n = 3;
  Rational p0{2};
  Rational q0{8};
  Rational alpha{0};
  Rational beta{0};
  Rational lambda{0};
  Rational mu{1};
  bool exact = true;

  static SystemParams from_doubles(int n, double p0, double q0, double alpha,
                                   double beta, double lambda, double mu);

  // lhs - rhs of ((n-1)/n)(1/(p0+1)) + 1/(q0+1) = (alpha+beta+mu-lambda)/n.
  Rational system_balance_residual() const;

  // Absorbing the outer weights into the unknowns (u -> |y|^alpha u,
  // v -> |x|^beta v) turns the double-weight system into the single-weight
  // form; the weight powers pick up the factors p0+1 and q0+1.
  SystemParams single_weight_equivalent() const;
};

// p0 = 1/(p-1), q0 = 1/(q'-1). Throws std::domain_error when p or q' <= 1.
SystemParams derive_el_exponents(const InequalityParams& ip);

// (n-1-alpha)/(p0+1) + (n-beta)/(q0+1) - (mu-lambda). Zero is necessary for
// existence of decaying positive solutions of the single-weight system.
Rational pohozaev_residual(const SystemParams& sys);

struct Interval {
  Rational lo{0};
  Rational hi{0};
  bool empty = true;

  bool contains(const Rational& x) const { return !empty && lo < x && x < hi; }
};

struct RegularityWindow {
  Interval inv_r;  // admissible 1/r for the boundary component u
  Interval inv_s;  // admissible 1/s for the bulk component v
};

// Open intervals of integrability exponents guaranteed for positive
// solutions of the single-weight system; each is the intersection of two
// stated open intervals and may come back empty.
RegularityWindow regularity_window(const SystemParams& sys);

}  // namespace swhs
