#include "dmgt/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dmgt {

struct DistortionModulus::Node {
  Form form = Form::Zero;
  double p[4] = {0, 0, 0, 0};
  std::vector<DistortionModulus> children;
};

DistortionModulus::DistortionModulus() : node_(std::make_shared<Node>()) {}

DistortionModulus DistortionModulus::zero() { return DistortionModulus(); }

DistortionModulus DistortionModulus::exp_linear(double c) {
  if (!(c >= 0)) throw std::invalid_argument("exp_linear: c must be nonnegative");
  auto n = std::make_shared<Node>();
  n->form = Form::ExpLinear;
  n->p[0] = c;
  return DistortionModulus(n);
}

DistortionModulus DistortionModulus::power_pair(double c1, double a, double c2, double b) {
  if (!(c1 >= 0 && c2 >= 0 && a > 0 && b > 0))
    throw std::invalid_argument("power_pair: coefficients must be nonnegative, exponents positive");
  auto n = std::make_shared<Node>();
  n->form = Form::PowerPair;
  n->p[0] = c1;
  n->p[1] = a;
  n->p[2] = c2;
  n->p[3] = b;
  return DistortionModulus(n);
}

DistortionModulus DistortionModulus::max_of(const std::vector<DistortionModulus>& parts) {
  if (parts.empty()) throw std::invalid_argument("max_of: empty list");
  std::vector<DistortionModulus> kept;
  for (const auto& m : parts)
    if (!m.is_zero()) kept.push_back(m);
  if (kept.empty()) return zero();
  if (kept.size() == 1) return kept.front();
  auto n = std::make_shared<Node>();
  n->form = Form::Max;
  n->children = kept;
  return DistortionModulus(n);
}

DistortionModulus DistortionModulus::sum_of(const std::vector<DistortionModulus>& parts) {
  std::vector<DistortionModulus> kept;
  for (const auto& m : parts)
    if (!m.is_zero()) kept.push_back(m);
  if (kept.empty()) return zero();
  if (kept.size() == 1) return kept.front();
  auto n = std::make_shared<Node>();
  n->form = Form::Sum;
  n->children = kept;
  return DistortionModulus(n);
}

DistortionModulus DistortionModulus::scaled(double outer, const DistortionModulus& inner,
                                            double input_scale) {
  if (!(outer >= 0 && input_scale > 0)) throw std::invalid_argument("scaled: invalid factors");
  if (inner.is_zero() || outer == 0.0) return zero();
  if (outer == 1.0 && input_scale == 1.0) return inner;
  auto n = std::make_shared<Node>();
  n->form = Form::Scaled;
  n->p[0] = outer;
  n->p[1] = input_scale;
  n->children = {inner};
  return DistortionModulus(n);
}

double DistortionModulus::operator()(double delta) const {
  if (delta < 0) throw std::invalid_argument("modulus evaluated at negative delta");
  const Node& n = *node_;
  switch (n.form) {
    case Form::Zero:
      return 0.0;
    case Form::ExpLinear:
      if (n.p[0] == 0.0 || delta == 0.0) return 0.0;
      return std::expm1(n.p[0] * delta);
    case Form::PowerPair:
      if (delta == 0.0) return 0.0;
      return n.p[0] * std::pow(delta, n.p[1]) + n.p[2] * std::pow(delta, n.p[3]);
    case Form::Max: {
      double v = 0.0;
      for (const auto& c : n.children) v = std::max(v, c(delta));
      return v;
    }
    case Form::Sum: {
      double v = 0.0;
      for (const auto& c : n.children) v += c(delta);
      return v;
    }
    case Form::Scaled:
      return n.p[0] * n.children.front()(delta * n.p[1]);
  }
  return 0.0;
}

DistortionModulus::Form DistortionModulus::form() const { return node_->form; }

bool DistortionModulus::is_zero() const { return node_->form == Form::Zero; }

std::string DistortionModulus::describe() const {
  const Node& n = *node_;
  std::ostringstream os;
  os.precision(6);
  switch (n.form) {
    case Form::Zero:
      os << "0";
      break;
    case Form::ExpLinear:
      os << "exp(" << n.p[0] << "*d)-1";
      break;
    case Form::PowerPair:
      os << n.p[0] << "*d^" << n.p[1] << " + " << n.p[2] << "*d^" << n.p[3];
      break;
    case Form::Max:
    case Form::Sum: {
      os << (n.form == Form::Max ? "max{" : "sum{");
      for (size_t i = 0; i < n.children.size(); ++i)
        os << (i ? "; " : "") << n.children[i].describe();
      os << "}";
      break;
    }
    case Form::Scaled:
      os << n.p[0] << "*[" << n.children.front().describe() << "](" << n.p[1] << "*d)";
      break;
  }
  return os.str();
}

DistortionModulus separable_modulus(double G, double H) {
  if (!(G > 0 && H > 0)) throw std::invalid_argument("separable_modulus: G, H must be positive");
  return DistortionModulus::exp_linear(G * H);
}

DistortionModulus self_concordant_modulus(double M, double mu) {
  if (!(M > 0 && mu > 0)) throw std::invalid_argument("self_concordant_modulus: M, mu must be positive");
  return DistortionModulus::exp_linear(2.0 * M / std::sqrt(mu));
}

}  // namespace dmgt
