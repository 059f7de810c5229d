#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dmgt/types.hpp"

namespace dmgt {

enum class DomainKind { AllSpace, OpenPositiveOrthant, Box, Simplex, Derived };

struct SamplingOptions {
  double orthant_floor = 0.1;
};

inline constexpr double kBoundaryGuard = 1e-14;

class Domain {
 public:
  static Domain all_space(int d);
  static Domain open_orthant(int d);
  static Domain box(int d, double lo, double hi);
  static Domain simplex(int d);
  static Domain intervals(const Vec& lo, const Vec& hi);
  static Domain product(const std::vector<Domain>& parts);

  int dim() const { return d_; }
  DomainKind kind() const;
  std::string describe() const;

  bool contains(const Vec& x) const;
  bool contains_closure(const Vec& x) const;
  void require_interior(const Vec& x, const std::string& where) const;

  Vec sample(std::mt19937_64& rng, const SamplingOptions& opt = {}) const;
  Vec center() const;

  Domain pullback(const Mat& A, const Vec& b) const;
  Domain intersect(const Domain& other) const;

  bool is_interval() const { return simplices_.empty() && pullbacks_.empty(); }
  const Vec& lower() const { return lo_; }
  const Vec& upper() const { return hi_; }

 private:
  struct SimplexBlock {
    int offset;
    int size;
  };
  struct Pullback {
    std::shared_ptr<const Domain> base;
    int offset;
    Mat A;
    Vec b;
    Mat A_inv;
  };

  explicit Domain(int d);
  Vec sample_intervals(std::mt19937_64& rng, const SamplingOptions& opt) const;

  int d_ = 0;
  Vec lo_;
  Vec hi_;
  std::vector<SimplexBlock> simplices_;
  std::vector<Pullback> pullbacks_;
  bool pullback_sampler_ = false;
};

}  // namespace dmgt
