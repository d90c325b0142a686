#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ncdiff/algebra.hpp"

namespace ncdiff {

// Algebra endomorphism given by generator images. Images of formal inverses
// are forced: an invertible generator must map to an invertible monomial
// c * w, and its inverse then maps to c^-1 * w^-1.
class Endomorphism {
public:
  Endomorphism() = default;
  static Endomorphism identity(std::shared_ptr<const Algebra> alg, std::string name = "id");
  // Generators missing from `images` are fixed.
  static Endomorphism from_images(std::shared_ptr<const Algebra> alg, std::string name,
                                  const std::map<Symbol, Element>& images);

  const std::string& name() const { return name_; }
  const Algebra& algebra() const { return *alg_; }
  const std::shared_ptr<const Algebra>& algebra_ptr() const { return alg_; }
  // Image of any symbol, base or inverse.
  const Element& image(Symbol s) const { return images_.at(s); }
  // Scaling automorphism g -> c_g g on every base generator.
  bool is_diagonal() const { return diagonal_; }
  const std::vector<RationalFunction>& scalars() const { return scalars_; }

  const Endomorphism* declared_inverse() const { return inverse_.get(); }
  void set_inverse(const Endomorphism& inv);

  Element apply(const Element& x) const;
  Element apply(const Combination& c) const;
  Element apply_letters(const std::vector<Symbol>& letters) const;

  // Same generator images.
  bool same_images(const Endomorphism& other) const;

private:
  std::shared_ptr<const Algebra> alg_;
  std::string name_;
  std::vector<Element> images_;
  bool diagonal_ = false;
  std::vector<RationalFunction> scalars_;  // per symbol, when diagonal
  std::shared_ptr<const Endomorphism> inverse_;
};

Element apply(const Endomorphism& phi, const Element& x);

// Checks phi(L) = phi(R) for every defining relation and the inverse-pair
// consistency phi(g) phi(g^-1) = 1 = phi(g^-1) phi(g).
bool verify_respects_relations(const Endomorphism& phi);

// (phi o psi)(x) = phi(psi(x)).
Endomorphism compose(const Endomorphism& phi, const Endomorphism& psi);
// Throws MissingInverse without a declared inverse.
bool verify_inverse(const Endomorphism& phi);

struct TwistedDerivation {
  Element weight;  // a_s
  Endomorphism twist;  // phi_s
};

// weight * twist(x) - x * weight
Element derive_apply(const TwistedDerivation& e, const Element& x);

std::string to_string(const Endomorphism& phi);

}  // namespace ncdiff
