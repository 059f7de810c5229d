#pragma once

#include "dmgt/types.hpp"

namespace dmgt {

// Structured symmetric positive definite matrix.
class Hessian {
 public:
  enum class Form { Diagonal, DiagonalPlusRankOne, Dense };

  static Hessian diagonal(const Vec& diag);
  // a*I + b*u*u^T with ||u|| = 1
  static Hessian rank_one(int d, double a, double b, const Vec& u);
  static Hessian dense(const Mat& H);

  Form form() const { return form_; }
  int dim() const { return d_; }
  Vec apply(const Vec& v) const;
  Vec solve(const Vec& v) const;
  Mat to_dense() const;
  const Vec& diag() const { return diag_; }

 private:
  Form form_ = Form::Diagonal;
  int d_ = 0;
  Vec diag_;
  double a_ = 0.0;
  double b_ = 0.0;
  Vec u_;
  Mat dense_;
};

}  // namespace dmgt
