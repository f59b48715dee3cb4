#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <vector>

#include "modwave/common.hpp"

namespace modwave::spectral {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

/// The canonical symplectic form J = [[0, I], [-I, 0]] of half-dimension N,
/// kept implicit; J^2 = -I and J^T = -J by construction.
struct SymplecticForm {
  Eigen::Index half_dim;
};

struct Eigensystem {
  VectorXcd values;   // sorted by (real, imag), ascending
  MatrixXcd vectors;  // unit columns, phase-fixed, same order
};

namespace detail {

inline void check_square(Eigen::Index rows, Eigen::Index cols, const char* who) {
  if (rows != cols)
    throw DomainError(std::string(who) + ": matrix must be square, got " +
                      std::to_string(rows) + "x" + std::to_string(cols));
}

template <class Mat>
void check_finite(const Mat& a, const char* who) {
  if (!a.allFinite())
    throw DomainError(std::string(who) + ": matrix has non-finite entries");
}

/// Sort eigenpairs by (re, im) and fix each vector's phase so that its
/// largest-modulus component is real positive. Makes output deterministic.
inline Eigensystem canonicalize(VectorXcd values, MatrixXcd vectors) {
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    if (values[i].real() != values[j].real()) return values[i].real() < values[j].real();
    return values[i].imag() < values[j].imag();
  });

  Eigensystem out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = values[order[static_cast<std::size_t>(k)]];
    VectorXcd v = vectors.col(order[static_cast<std::size_t>(k)]);
    double nrm = v.norm();
    if (nrm > 0) v /= nrm;
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double m = std::abs(v[i]);
      if (m > best + 1e-15) {
        best = m;
        imax = i;
      }
    }
    if (best > 0) v *= std::conj(v[imax]) / std::abs(v[imax]);
    out.vectors.col(k) = v;
  }
  return out;
}

}  // namespace detail

/// Full eigendecomposition of a dense complex matrix.
/// Deterministic ordering: eigenvalues ascending by real part, then imaginary.
inline Eigensystem eig(const MatrixXcd& a) {
  detail::check_square(a.rows(), a.cols(), "eig");
  detail::check_finite(a, "eig");
  Eigen::ComplexEigenSolver<MatrixXcd> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw NumericError("eig: QR iteration failed to converge on " +
                       std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                       " matrix");
  return detail::canonicalize(solver.eigenvalues(), solver.eigenvectors());
}

inline Eigensystem eig(const MatrixXd& a) {
  detail::check_square(a.rows(), a.cols(), "eig");
  detail::check_finite(a, "eig");
  Eigen::EigenSolver<MatrixXd> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw NumericError("eig: QR iteration failed to converge on " +
                       std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                       " matrix");
  return detail::canonicalize(solver.eigenvalues(), solver.eigenvectors());
}

/// Eigenvalues only (same ordering contract as eig).
inline VectorXcd eigenvalues(const MatrixXcd& a) { return eig(a).values; }
inline VectorXcd eigenvalues(const MatrixXd& a) { return eig(a).values; }

/// Determinant via pivoted LU.
inline double det(const MatrixXd& a) {
  detail::check_square(a.rows(), a.cols(), "det");
  detail::check_finite(a, "det");
  return a.partialPivLu().determinant();
}

inline Complex det(const MatrixXcd& a) {
  detail::check_square(a.rows(), a.cols(), "det");
  detail::check_finite(a, "det");
  return a.partialPivLu().determinant();
}

namespace detail {

// ||op(m) J m - J||_F without forming J: J*m swaps the row blocks of m and
// negates the lower one.
template <class Mat>
double symplectic_deviation_impl(const Mat& m, const SymplecticForm& j, bool adjoint) {
  const Eigen::Index n = j.half_dim;
  if (m.rows() != m.cols() || m.rows() != 2 * n)
    throw DomainError("symplectic_deviation: matrix is " + std::to_string(m.rows()) +
                      "x" + std::to_string(m.cols()) + ", form expects " +
                      std::to_string(2 * n) + "x" + std::to_string(2 * n));
  Mat jm(2 * n, 2 * n);
  jm.topRows(n) = m.bottomRows(n);
  jm.bottomRows(n) = -m.topRows(n);
  Mat r = adjoint ? Mat(m.adjoint() * jm) : Mat(m.transpose() * jm);
  r.block(0, n, n, n).diagonal().array() -= 1.0;
  r.block(n, 0, n, n).diagonal().array() += 1.0;
  return r.norm();
}

}  // namespace detail

/// Frobenius deviation ||m^T J m - J||; zero iff m is symplectic.
inline double symplectic_deviation(const MatrixXd& m, const SymplecticForm& j) {
  return detail::symplectic_deviation_impl(m, j, false);
}

/// Complex variant uses the conjugate transpose, ||m^dag J m - J||: the
/// Bloch-reduced cell system has a Hermitian stiffness matrix, so its
/// propagators conserve the form under the adjoint, not the plain transpose.
inline double symplectic_deviation(const MatrixXcd& m, const SymplecticForm& j) {
  return detail::symplectic_deviation_impl(m, j, true);
}

template <class Mat>
double symplectic_deviation(const Mat& m) {
  if (m.rows() % 2 != 0)
    throw DomainError("symplectic_deviation: odd dimension " + std::to_string(m.rows()));
  return symplectic_deviation(m, SymplecticForm{m.rows() / 2});
}

/// Worst-case defect of the (lambda, 1/conj(lambda)) multiplier pairing:
/// max over lambda of min over mu of |lambda * conj(mu) - 1|. Spectra of
/// symplectic propagators give ~0; real ones are additionally conjugate-closed,
/// which makes the pairing equivalent to (lambda, 1/lambda).
inline double symplectic_pairing_defect(const VectorXcd& multipliers) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < multipliers.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < multipliers.size(); ++k)
      best = std::min(best, std::abs(multipliers[i] * std::conj(multipliers[k]) - 1.0));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace modwave::spectral
