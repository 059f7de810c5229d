#include "dmgt/hessian.hpp"

#include <cmath>

#include "dmgt/errors.hpp"

namespace dmgt {

Hessian Hessian::diagonal(const Vec& diag) {
  Hessian H;
  H.form_ = Form::Diagonal;
  H.d_ = static_cast<int>(diag.size());
  H.diag_ = diag;
  return H;
}

Hessian Hessian::rank_one(int d, double a, double b, const Vec& u) {
  Hessian H;
  H.form_ = Form::DiagonalPlusRankOne;
  H.d_ = d;
  H.a_ = a;
  H.b_ = b;
  H.u_ = u;
  return H;
}

Hessian Hessian::dense(const Mat& M) {
  Hessian H;
  H.form_ = Form::Dense;
  H.d_ = static_cast<int>(M.rows());
  H.dense_ = M;
  return H;
}

Vec Hessian::apply(const Vec& v) const {
  switch (form_) {
    case Form::Diagonal:
      return diag_.cwiseProduct(v);
    case Form::DiagonalPlusRankOne:
      return a_ * v + b_ * u_.dot(v) * u_;
    case Form::Dense:
      return dense_ * v;
  }
  return v;
}

Vec Hessian::solve(const Vec& v) const {
  switch (form_) {
    case Form::Diagonal:
      for (int i = 0; i < d_; ++i)
        if (!(diag_(i) > 0) || !std::isfinite(diag_(i)))
          throw SingularHessian("diagonal Hessian entry is not positive");
      return v.cwiseQuotient(diag_);
    case Form::DiagonalPlusRankOne: {
      if (!(a_ > 0) || !(a_ + b_ > 0) || !std::isfinite(a_) || !std::isfinite(b_))
        throw SingularHessian("rank-one Hessian is not positive definite");
      return (v - (b_ / (a_ + b_)) * u_.dot(v) * u_) / a_;
    }
    case Form::Dense: {
      Eigen::LLT<Mat> llt(dense_);
      if (llt.info() != Eigen::Success) throw SingularHessian("dense Hessian is not positive definite");
      return llt.solve(v);
    }
  }
  return v;
}

Mat Hessian::to_dense() const {
  switch (form_) {
    case Form::Diagonal:
      return diag_.asDiagonal();
    case Form::DiagonalPlusRankOne:
      return a_ * Mat::Identity(d_, d_) + b_ * u_ * u_.transpose();
    case Form::Dense:
      return dense_;
  }
  return {};
}

}  // namespace dmgt
