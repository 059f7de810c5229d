#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dmgt/domain.hpp"
#include "dmgt/hessian.hpp"
#include "dmgt/modulus.hpp"
#include "dmgt/scalar.hpp"
#include "dmgt/types.hpp"

namespace dmgt {

class KernelImpl {
 public:
  virtual ~KernelImpl() = default;
  // Closure-safe where the kernel extends continuously; +inf otherwise.
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  virtual Hessian hessian(const Vec& x) const = 0;
  virtual Vec gradient_conjugate(const Vec& z) const = 0;
  // Per-coordinate pieces when the kernel is coordinate-separable; empty otherwise.
  virtual std::vector<ScalarPtr> scalars() const { return {}; }
  virtual double scalar_constant() const { return 0.0; }
};

class Kernel {
 public:
  Kernel(std::shared_ptr<const KernelImpl> impl, Domain domain, DistortionModulus modulus,
         std::string id, bool standard_quadratic = false);

  int dim() const { return domain_.dim(); }
  const Domain& domain() const { return domain_; }
  const DistortionModulus& modulus() const { return modulus_; }
  const std::string& id() const { return id_; }
  bool separable() const { return !impl_->scalars().empty(); }
  bool standard_quadratic() const { return standard_quadratic_; }
  const KernelImpl& impl() const { return *impl_; }
  std::shared_ptr<const KernelImpl> impl_ptr() const { return impl_; }

  double eval(const Vec& x) const;
  Vec grad(const Vec& x) const;
  Hessian hessian(const Vec& x) const;
  Vec hess_apply(const Vec& x, const Vec& v) const;
  Vec hess_solve(const Vec& x, const Vec& v) const;
  Vec grad_conj(const Vec& z) const;
  double bregman(const Vec& u, const Vec& v) const;
  double dual_dist(const Vec& x, const Vec& y) const;
  double zeta(double delta) const { return modulus_(delta); }

 private:
  std::shared_ptr<const KernelImpl> impl_;
  Domain domain_;
  DistortionModulus modulus_;
  std::string id_;
  bool standard_quadratic_;
};

Kernel euclidean(int d);
Kernel euclidean(const Mat& A);
Kernel boltzmann_shannon(int d);
Kernel lipschitz_hessian(int d, double mu, double rho);
Kernel power(int d, double mu, double r);
Kernel tsallis(int d, double mu, double q);
Kernel burg(int d, double mu);
Kernel exponential(int d, double mu);
Kernel norm_exponential(int d);
Kernel harmonic(int d, double mu, double p);
Kernel hellinger(int d);
Kernel self_concordant(int d, double mu, double M);
Kernel fermi_dirac(int d);

Kernel concat(const std::vector<Kernel>& kernels);
Kernel affine_compose(const Kernel& k, double c, const Mat& A, const Vec& b);

struct CombineMode {
  enum class Kind { QuadraticShift, CoordinateSeparable, CrossMonotone };
  Kind kind = Kind::CoordinateSeparable;
  double kappa_h = 1.0;
  double kappa_g = 1.0;

  static CombineMode quadratic_shift() { return {Kind::QuadraticShift, 1.0, 1.0}; }
  static CombineMode coordinate_separable() { return {Kind::CoordinateSeparable, 1.0, 1.0}; }
  static CombineMode cross_monotone(double kh, double kg) { return {Kind::CrossMonotone, kh, kg}; }
};

Kernel combine(const Kernel& h1, const Kernel& h2, CombineMode mode);

// x -> k(x + offset)
Kernel shifted(const Kernel& k, const Vec& offset);

struct CatalogueEntry {
  std::string name;
  Kernel kernel;
};

// Every tabulated kernel at the reference parameters.
std::vector<CatalogueEntry> kernel_catalogue(int d);

}  // namespace dmgt
