#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace secrelay {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

// FD: relay nulls its self-interference and everyone transmits every slot.
// HD: no self-interference at all, but every rate is halved.
enum class Duplex { kFull, kHalf };

enum class Node { kAlice, kBob };

const char* to_string(Duplex d);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A numeric argument is outside the domain where a formula is defined
// (non-Hermitian input, nonpositive log argument, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class NoNullingDimensions : public Error {
 public:
  NoNullingDimensions() : Error("no nulling dimensions: H_RR has full column rank") {}
};

class RankExceeded : public Error {
 public:
  using Error::Error;
};

class InfeasibleEH : public Error {
 public:
  using Error::Error;
};

class LineSearchFailure : public Error {
 public:
  using Error::Error;
};

class InfeasiblePoint : public Error {
 public:
  using Error::Error;
};

/// Hermitian part (A + A^H) / 2.
inline CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

/// Real inner product <A, B> = Re Tr(A^H B) used for every matrix gradient.
inline double inner(const CMatrix& a, const CMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

/// Quadratic form v^H A v for Hermitian A (imaginary round-off dropped).
inline double quad(const CVector& v, const CMatrix& a) { return v.dot(a * v).real(); }

}  // namespace secrelay
