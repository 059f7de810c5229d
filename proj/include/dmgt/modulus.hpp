#pragma once

#include <memory>
#include <string>
#include <vector>

namespace dmgt {

class DistortionModulus {
 public:
  enum class Form { Zero, ExpLinear, PowerPair, Max, Sum, Scaled };

  DistortionModulus();

  static DistortionModulus zero();
  static DistortionModulus exp_linear(double c);
  static DistortionModulus power_pair(double c1, double a, double c2, double b);
  static DistortionModulus max_of(const std::vector<DistortionModulus>& parts);
  static DistortionModulus sum_of(const std::vector<DistortionModulus>& parts);
  static DistortionModulus scaled(double outer, const DistortionModulus& inner, double input_scale);

  double operator()(double delta) const;
  Form form() const;
  bool is_zero() const;
  std::string describe() const;

 private:
  struct Node;
  explicit DistortionModulus(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

DistortionModulus separable_modulus(double G, double H);
DistortionModulus self_concordant_modulus(double M, double mu);

}  // namespace dmgt
