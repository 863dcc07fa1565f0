#include "swhs/params.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace swhs {

Rational conjugate_exponent(const Rational& p) {
  if (p == 1) throw std::domain_error("conjugate_exponent: p == 1");
  return p / (p - 1);
}

std::string to_string(const Rational& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

namespace {

std::optional<BigInt> parse_integer(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) return std::nullopt;
  BigInt v = 0;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
    v = v * 10 + (s[i] - '0');
  }
  return neg ? -v : v;
}

BigInt pow10(long long e) {
  BigInt r = 1;
  for (long long i = 0; i < e; ++i) r *= 10;
  return r;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  // strip surrounding whitespace
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_integer(text.substr(0, slash));
    auto den = parse_integer(text.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    return Rational(*num, *den);
  }

  // mantissa [.fraction] [e exponent]
  std::string_view mant = text;
  long long exp10 = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    auto ev = parse_integer(text.substr(e + 1));
    if (!ev || *ev > 8192 || *ev < -8192) return std::nullopt;
    exp10 = ev->convert_to<long long>();
    mant = text.substr(0, e);
  }
  std::string digits;
  long long frac_digits = 0;
  std::size_t i = 0;
  bool neg = false, seen_digit = false, seen_dot = false;
  if (i < mant.size() && (mant[i] == '+' || mant[i] == '-')) {
    neg = mant[i] == '-';
    ++i;
  }
  for (; i < mant.size(); ++i) {
    char c = mant[i];
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_dot) ++frac_digits;
      seen_digit = true;
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;
  BigInt num = 0;
  for (char c : digits) num = num * 10 + (c - '0');
  if (neg) num = -num;
  long long e = exp10 - frac_digits;
  Rational r = e >= 0 ? Rational(num * pow10(e)) : Rational(num, pow10(-e));
  return r;
}

namespace {

Rational require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::domain_error(std::string(what) + ": non-finite value");
  return Rational(v);
}

}  // namespace

InequalityParams InequalityParams::from_doubles(int n, double p, double q_prime,
                                                double alpha, double beta,
                                                double lambda, double mu) {
  InequalityParams ip;
  ip.n = n;
  ip.p = require_finite(p, "p");
  ip.q_prime = require_finite(q_prime, "q_prime");
  ip.alpha = require_finite(alpha, "alpha");
  ip.beta = require_finite(beta, "beta");
  ip.lambda = require_finite(lambda, "lambda");
  ip.mu = require_finite(mu, "mu");
  ip.exact = false;
  return ip;
}

Rational InequalityParams::inv_q() const {
  Rational nn(n);
  return (nn - 1) / nn / p + (alpha + beta + mu - lambda - nn + 1) / nn;
}

Rational InequalityParams::inv_p_prime() const {
  Rational nn(n);
  return nn / (nn - 1) / q_prime + (alpha + beta + mu - lambda - nn) / (nn - 1);
}

std::optional<Rational> InequalityParams::q() const {
  Rational iq = inv_q();
  if (iq <= 0) return std::nullopt;
  return 1 / iq;
}

std::optional<Rational> InequalityParams::p_prime() const {
  Rational ip = inv_p_prime();
  if (ip <= 0) return std::nullopt;
  return 1 / ip;
}

Rational InequalityParams::balance_residual() const {
  Rational nn(n);
  return (nn - 1) / nn / p + 1 / q_prime + (alpha + beta + mu - lambda) / nn -
         (2 * nn - 1) / nn;
}

const Condition* AdmissibilityReport::find(std::string_view name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

AdmissibilityReport validate(const InequalityParams& ip, WeightConvention wc) {
  AdmissibilityReport rep;
  const Rational nn(ip.n);
  const Rational tol(1, BigInt(1000000000000LL));  // 1e-12, float path only

  enum class Kind { Strict, NonStrict, Equality };
  auto push = [&](std::string name, const Rational& slack, Kind kind) {
    bool holds = false;
    switch (kind) {
      case Kind::Strict:
        holds = slack > 0;
        break;
      case Kind::NonStrict:
        holds = ip.exact ? slack >= 0 : slack >= -tol;
        break;
      case Kind::Equality:
        holds = ip.exact ? slack == 0 : (slack <= tol && slack >= -tol);
        break;
    }
    rep.conditions.push_back({std::move(name), holds, to_double(slack)});
  };

  push("n_ge_3", Rational(ip.n - 3), Kind::NonStrict);
  push("p_gt_1", ip.p - 1, Kind::Strict);
  push("q_prime_gt_1", ip.q_prime - 1, Kind::Strict);
  push("lambda_nonneg", ip.lambda, Kind::NonStrict);
  push("mu_positive", ip.mu, Kind::Strict);
  push("mu_lt_n_minus_2lambda", nn - 2 * ip.lambda - ip.mu, Kind::Strict);
  push("mu_window",
       1 - ((ip.mu - 2 * ip.lambda) / (2 * nn) + ip.mu / (2 * (nn - 1))),
       Kind::Strict);
  push("index_sum", (nn - 1) / nn / ip.p + 1 / ip.q_prime - 1, Kind::NonStrict);
  push("balance", ip.balance_residual(), Kind::Equality);
  // alpha < (n-1)/p', beta < (n+q)/q = 1 + n/q, both written through the
  // dimension relations so they stay meaningful while balance is violated
  push("alpha_upper", (nn - 1) * ip.inv_p_prime() - ip.alpha, Kind::Strict);
  push("beta_upper", 1 + nn * ip.inv_q() - ip.beta, Kind::Strict);
  if (wc == WeightConvention::Sum) {
    push("alpha_plus_beta_nonneg", ip.alpha + ip.beta, Kind::NonStrict);
  } else {
    push("alpha_nonneg", ip.alpha, Kind::NonStrict);
    push("beta_nonneg", ip.beta, Kind::NonStrict);
  }

  rep.admissible = true;
  for (const auto& c : rep.conditions) rep.admissible = rep.admissible && c.holds;
  rep.q = ip.q();
  rep.p_prime = ip.p_prime();
  return rep;
}

SystemParams SystemParams::from_doubles(int n, double p0, double q0,
                                        double alpha, double beta,
                                        double lambda, double mu) {
  SystemParams sp;
  sp.n = n;
  sp.p0 = require_finite(p0, "p0");
  sp.q0 = require_finite(q0, "q0");
  sp.alpha = require_finite(alpha, "alpha");
  sp.beta = require_finite(beta, "beta");
  sp.lambda = require_finite(lambda, "lambda");
  sp.mu = require_finite(mu, "mu");
  sp.exact = false;
  return sp;
}

Rational SystemParams::system_balance_residual() const {
  Rational nn(n);
  return (nn - 1) / nn / (p0 + 1) + 1 / (q0 + 1) - (alpha + beta + mu - lambda) / nn;
}

SystemParams SystemParams::single_weight_equivalent() const {
  SystemParams sw = *this;
  sw.alpha = alpha * (p0 + 1);
  sw.beta = beta * (q0 + 1);
  return sw;
}

SystemParams derive_el_exponents(const InequalityParams& ip) {
  if (ip.p <= 1 || ip.q_prime <= 1)
    throw std::domain_error("derive_el_exponents: p and q' must exceed 1");
  SystemParams sp;
  sp.n = ip.n;
  sp.p0 = 1 / (ip.p - 1);
  sp.q0 = 1 / (ip.q_prime - 1);
  sp.alpha = ip.alpha;
  sp.beta = ip.beta;
  sp.lambda = ip.lambda;
  sp.mu = ip.mu;
  sp.exact = ip.exact;
  return sp;
}

Rational pohozaev_residual(const SystemParams& sys) {
  Rational nn(sys.n);
  return (nn - 1 - sys.alpha) / (sys.p0 + 1) + (nn - sys.beta) / (sys.q0 + 1) -
         (sys.mu - sys.lambda);
}

namespace {

Interval make_interval(Rational lo, Rational hi) {
  Interval iv;
  iv.lo = std::move(lo);
  iv.hi = std::move(hi);
  iv.empty = !(iv.lo < iv.hi);
  return iv;
}

Interval intersect(const Interval& a, const Interval& b) {
  if (a.empty || b.empty) return Interval{};
  return make_interval(std::max(a.lo, b.lo), std::min(a.hi, b.hi));
}

}  // namespace

RegularityWindow regularity_window(const SystemParams& sys) {
  const Rational nn(sys.n);
  const Rational A = 1 / (sys.p0 + 1);
  const Rational B = 1 / (sys.q0 + 1);
  const Rational dec = sys.mu - sys.lambda;

  Interval r1 = make_interval(sys.alpha / (nn - 1), (sys.alpha + dec + 1) / (nn - 1));
  Interval r2 = make_interval(A - nn / (nn - 1) * B + (sys.beta - 1) / (nn - 1),
                              A - nn / (nn - 1) * B + (sys.beta + dec) / nn);
  Interval s1 = make_interval((sys.beta - 1) / nn, (sys.beta + dec) / nn);
  Interval s2 = make_interval(B - (nn - 1) / nn * A + sys.alpha / nn,
                              B - (nn - 1) / nn * A + (sys.alpha + dec + 1) / (nn - 1));

  RegularityWindow w;
  w.inv_r = intersect(r1, r2);
  w.inv_s = intersect(s1, s2);
  return w;
}

}  // namespace swhs
