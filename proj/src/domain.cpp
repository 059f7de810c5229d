#include "dmgt/domain.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dmgt/errors.hpp"

namespace dmgt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_diagonal(const Mat& A) {
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      if (i != j && A(i, j) != 0.0) return false;
  return true;
}

}  // namespace

Domain::Domain(int d) : d_(d), lo_(Vec::Constant(d, -kInf)), hi_(Vec::Constant(d, kInf)) {}

Domain Domain::all_space(int d) { return Domain(d); }

Domain Domain::open_orthant(int d) {
  Domain D(d);
  D.lo_.setZero();
  return D;
}

Domain Domain::box(int d, double lo, double hi) {
  Domain D(d);
  D.lo_.setConstant(lo);
  D.hi_.setConstant(hi);
  return D;
}

Domain Domain::simplex(int d) {
  Domain D = open_orthant(d);
  D.simplices_.push_back({0, d});
  return D;
}

Domain Domain::intervals(const Vec& lo, const Vec& hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("interval bounds differ in size");
  Domain D(static_cast<int>(lo.size()));
  D.lo_ = lo;
  D.hi_ = hi;
  return D;
}

Domain Domain::product(const std::vector<Domain>& parts) {
  int d = 0;
  for (const auto& p : parts) d += p.d_;
  Domain D(d);
  int off = 0;
  for (const auto& p : parts) {
    D.lo_.segment(off, p.d_) = p.lo_;
    D.hi_.segment(off, p.d_) = p.hi_;
    for (const auto& s : p.simplices_) D.simplices_.push_back({s.offset + off, s.size});
    for (const auto& pb : p.pullbacks_) {
      Pullback q = pb;
      q.offset += off;
      D.pullbacks_.push_back(q);
    }
    off += p.d_;
  }
  return D;
}

DomainKind Domain::kind() const {
  if (!pullbacks_.empty()) return DomainKind::Derived;
  bool all_free = true, orthant = true, box = true;
  for (int i = 0; i < d_; ++i) {
    if (std::isfinite(lo_(i)) || std::isfinite(hi_(i))) all_free = false;
    if (lo_(i) != 0.0 || std::isfinite(hi_(i))) orthant = false;
    if (!std::isfinite(lo_(i)) || !std::isfinite(hi_(i)) || lo_(i) != lo_(0) || hi_(i) != hi_(0))
      box = false;
  }
  if (simplices_.size() == 1 && simplices_[0].size == d_ && orthant) return DomainKind::Simplex;
  if (!simplices_.empty()) return DomainKind::Derived;
  if (all_free) return DomainKind::AllSpace;
  if (orthant) return DomainKind::OpenPositiveOrthant;
  if (box) return DomainKind::Box;
  return DomainKind::Derived;
}

std::string Domain::describe() const {
  std::ostringstream os;
  switch (kind()) {
    case DomainKind::AllSpace: os << "all-space"; break;
    case DomainKind::OpenPositiveOrthant: os << "open-positive-orthant"; break;
    case DomainKind::Box: os << "box(" << lo_(0) << "," << hi_(0) << ")"; break;
    case DomainKind::Simplex: os << "simplex"; break;
    case DomainKind::Derived: os << "derived"; break;
  }
  os << "^" << d_;
  return os.str();
}

bool Domain::contains(const Vec& x) const {
  if (x.size() != d_) return false;
  for (int i = 0; i < d_; ++i) {
    if (!std::isfinite(x(i))) return false;
    if (!(x(i) - lo_(i) > kBoundaryGuard) || !(hi_(i) - x(i) > kBoundaryGuard)) return false;
  }
  for (const auto& s : simplices_)
    if (!(1.0 - x.segment(s.offset, s.size).sum() > kBoundaryGuard)) return false;
  for (const auto& pb : pullbacks_) {
    Vec w = pb.A * x.segment(pb.offset, pb.A.cols()) + pb.b;
    if (!pb.base->contains(w)) return false;
  }
  return true;
}

bool Domain::contains_closure(const Vec& x) const {
  if (x.size() != d_) return false;
  for (int i = 0; i < d_; ++i) {
    if (!std::isfinite(x(i))) return false;
    if (x(i) < lo_(i) || x(i) > hi_(i)) return false;
  }
  for (const auto& s : simplices_)
    if (x.segment(s.offset, s.size).sum() > 1.0) return false;
  for (const auto& pb : pullbacks_) {
    Vec w = pb.A * x.segment(pb.offset, pb.A.cols()) + pb.b;
    if (!pb.base->contains_closure(w)) return false;
  }
  return true;
}

void Domain::require_interior(const Vec& x, const std::string& where) const {
  if (!contains(x)) throw DomainViolation(where + ": point outside the interior of " + describe());
}

Vec Domain::sample_intervals(std::mt19937_64& rng, const SamplingOptions& opt) const {
  std::normal_distribution<double> N(0.0, 1.0);
  Vec x(d_);
  for (int i = 0; i < d_; ++i) {
    double g = N(rng);
    bool fl = std::isfinite(lo_(i)), fh = std::isfinite(hi_(i));
    if (!fl && !fh)
      x(i) = g;
    else if (fl && !fh)
      x(i) = lo_(i) + std::abs(g) + opt.orthant_floor;
    else if (!fl && fh)
      x(i) = hi_(i) - std::abs(g) - opt.orthant_floor;
    else
      x(i) = 0.5 * (lo_(i) + hi_(i)) + 0.5 * (hi_(i) - lo_(i)) * std::tanh(g);
  }
  for (const auto& s : simplices_) {
    Vec g(s.size + 1);
    for (int j = 0; j <= s.size; ++j) g(j) = N(rng);
    Vec e = (g.array() - g.maxCoeff()).exp();
    e /= e.sum();
    x.segment(s.offset, s.size) = e.head(s.size);
  }
  return x;
}

Vec Domain::sample(std::mt19937_64& rng, const SamplingOptions& opt) const {
  if (pullback_sampler_) {
    const auto& pb = pullbacks_.front();
    for (int tries = 0; tries < 1000; ++tries) {
      Vec x = pb.A_inv * (pb.base->sample(rng, opt) - pb.b);
      if (contains(x)) return x;
    }
    throw SamplingExhausted("domain sampler: no interior point after 1000 draws");
  }
  for (int tries = 0; tries < 1000; ++tries) {
    Vec x = sample_intervals(rng, opt);
    if (contains(x)) return x;
  }
  throw SamplingExhausted("domain sampler: no interior point after 1000 draws");
}

Vec Domain::center() const {
  if (pullback_sampler_) {
    const auto& pb = pullbacks_.front();
    return pb.A_inv * (pb.base->center() - pb.b);
  }
  Vec x(d_);
  for (int i = 0; i < d_; ++i) {
    bool fl = std::isfinite(lo_(i)), fh = std::isfinite(hi_(i));
    if (!fl && !fh)
      x(i) = 0.0;
    else if (fl && !fh)
      x(i) = lo_(i) + 1.0;
    else if (!fl && fh)
      x(i) = hi_(i) - 1.0;
    else
      x(i) = 0.5 * (lo_(i) + hi_(i));
  }
  for (const auto& s : simplices_) x.segment(s.offset, s.size).setConstant(1.0 / (s.size + 1));
  return x;
}

Domain Domain::pullback(const Mat& A, const Vec& b) const {
  if (A.rows() != d_ || A.cols() != d_ || b.size() != d_)
    throw std::invalid_argument("pullback: dimension mismatch");
  if (is_interval() && is_diagonal(A)) {
    Domain D(d_);
    for (int i = 0; i < d_; ++i) {
      double a = A(i, i);
      if (a == 0.0) throw SingularMatrix("pullback: singular diagonal map");
      double l = (lo_(i) - b(i)) / a, h = (hi_(i) - b(i)) / a;
      D.lo_(i) = a > 0 ? l : h;
      D.hi_(i) = a > 0 ? h : l;
    }
    return D;
  }
  Eigen::FullPivLU<Mat> lu(A);
  if (!lu.isInvertible()) throw SingularMatrix("pullback: singular map");
  Domain D(d_);
  D.pullbacks_.push_back({std::make_shared<const Domain>(*this), 0, A, b, lu.inverse()});
  D.pullback_sampler_ = true;
  return D;
}

Domain Domain::intersect(const Domain& other) const {
  if (other.d_ != d_) throw std::invalid_argument("intersect: dimension mismatch");
  Domain D(d_);
  D.lo_ = lo_.cwiseMax(other.lo_);
  D.hi_ = hi_.cwiseMin(other.hi_);
  D.simplices_ = simplices_;
  D.simplices_.insert(D.simplices_.end(), other.simplices_.begin(), other.simplices_.end());
  D.pullbacks_ = pullbacks_;
  D.pullbacks_.insert(D.pullbacks_.end(), other.pullbacks_.begin(), other.pullbacks_.end());
  if (pullback_sampler_ && other.is_interval() && other.kind() == DomainKind::AllSpace) {
    D.pullback_sampler_ = true;
  } else if (other.pullback_sampler_ && is_interval() && kind() == DomainKind::AllSpace) {
    D.pullbacks_ = other.pullbacks_;
    D.pullback_sampler_ = true;
  }
  return D;
}

}  // namespace dmgt
