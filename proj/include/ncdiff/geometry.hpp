#pragma once

// Automorphisms extended to forms, the left-linear tensor basis
// theta^s (x)_L theta^t := theta^s (x)_A phi_s^-1(theta^t), metrics and
// connections given by parallel-transport operators.

#include <map>
#include <utility>
#include <vector>

#include "ncdiff/calculus.hpp"
#include "ncdiff/linalg.hpp"

namespace ncdiff {

// phi on coefficients, theta_action on the theta basis: row s holds the
// coordinates of phi(theta^s).
struct FormExtension {
  Endomorphism base;
  Matrix theta_action;

  Form apply(const CalculusSpec& spec, const Form& omega) const;
};

FormExtension identity_extension(const Endomorphism& base, std::size_t size);
// Uses the declared inverse of the base and the inverse matrix. Throws
// MissingInverse when either is unavailable.
FormExtension inverse_extension(const FormExtension& ext);

// ext(d g) = d(base g) for every symbol g, and ext commutes with passing
// theta^s over base(g).
Verdict verify_differentiable(const CalculusSpec& spec, const FormExtension& ext);

class TensorForm {
public:
  using Key = std::pair<ThetaIndex, ThetaIndex>;
  using Terms = std::map<Key, Element>;

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Element entry(ThetaIndex s, ThetaIndex t) const;
  void add_term(ThetaIndex s, ThetaIndex t, const Element& coeff);

  TensorForm operator+(const TensorForm& o) const;
  TensorForm operator-(const TensorForm& o) const;
  TensorForm& operator+=(const TensorForm& o);
  TensorForm& operator-=(const TensorForm& o);
  bool operator==(const TensorForm& o) const { return (*this - o).is_zero(); }

private:
  Terms terms_;
};

// Calculus plus an extension of every twist to forms.
class Geometry {
public:
  Geometry(CalculusSpec spec, std::vector<FormExtension> extensions);

  const CalculusSpec& calculus() const { return spec_; }
  const FormExtension& extension(ThetaIndex s) const { return ext_.at(s); }
  const FormExtension& inverse(ThetaIndex s) const { return inv_.at(s); }

private:
  CalculusSpec spec_;
  std::vector<FormExtension> ext_;
  std::vector<FormExtension> inv_;
};

// transport[s][t] = V_s(theta^t), a grade-1 form.
struct Connection {
  std::vector<std::vector<Form>> transport;

  static Connection trivial(std::size_t size);
};

// Left-bilinear pairing of grade-1 forms in the (x)_L basis.
TensorForm tensor_L(const Geometry& geo, const Form& omega, const Form& eta);
// omega (x)_A eta rewritten in the (x)_L basis.
TensorForm tensor_A(const Geometry& geo, const Form& omega, const Form& eta);
Form transport_form(const Geometry& geo, const Connection& conn, ThetaIndex s, const Form& omega);
TensorForm transport_tensor(const Geometry& geo, const Connection& conn, ThetaIndex s,
                            const TensorForm& t);
// vartheta (x)_A omega - sum_s theta^s (x)_A V_s(omega)
TensorForm nabla(const Geometry& geo, const Connection& conn, const Form& omega);
Verdict metric_compatible(const Geometry& geo, const Connection& conn, const TensorForm& g);
// Multiplies out theta^s (x)_L theta^t = theta^s (x)_A phi_s^-1(theta^t).
Form wedge_project(const Geometry& geo, const TensorForm& t);
Form torsion(const Geometry& geo, const Connection& conn, const Form& omega);

std::string to_string(const TensorForm& t, const CalculusSpec& spec);

}  // namespace ncdiff
