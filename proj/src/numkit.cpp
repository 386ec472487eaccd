#include "ahnag/numkit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ahnag {

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

bool all_finite(const Vector& v) { return v.allFinite(); }

DiagPrecond::DiagPrecond(Vector diag) : diag_(std::move(diag)) {
  for (Index i = 0; i < diag_.size(); ++i) {
    const double w = diag_[i];
    if (std::isnan(w) || std::isinf(w)) {
      throw std::invalid_argument("DiagPrecond: non-finite diagonal entry at index " +
                                  std::to_string(i));
    }
    if (w < kFloor) diag_[i] = kFloor;
  }
}

DiagPrecond DiagPrecond::Identity(Index dim) { return DiagPrecond(Vector::Ones(dim)); }

DiagPrecond DiagPrecond::Constant(Index dim, double value) {
  return DiagPrecond(Vector::Constant(dim, value));
}

DiagPrecond DiagPrecond::inverse() const { return DiagPrecond(diag_.cwiseInverse()); }

DiagPrecond DiagPrecond::squared() const { return DiagPrecond(diag_.cwiseAbs2()); }

double weighted_sq_norm(const Vector& v, const DiagPrecond& w) {
  require_same_dim(v.size(), w.size(), "weighted_sq_norm");
  return (w.diag().array() * v.array().square()).sum();
}

double inverse_weighted_sq_norm(const Vector& v, const DiagPrecond& w, int power) {
  require_same_dim(v.size(), w.size(), "inverse_weighted_sq_norm");
  return (v.array().square() / w.diag().array().pow(power)).sum();
}

Vector inverse_apply(const DiagPrecond& w, const Vector& v) {
  require_same_dim(v.size(), w.size(), "inverse_apply");
  return (v.array() / w.diag().array()).matrix();
}

double inf_norm(const Vector& v) {
  if (v.size() == 0) throw std::invalid_argument("inf_norm: empty vector");
  return v.cwiseAbs().maxCoeff();
}

}  // namespace ahnag
