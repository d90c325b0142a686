#include "ncdiff/morphism.hpp"

#include "ncdiff/errors.hpp"

namespace ncdiff {

namespace {

// c * g with c scalar, for the generator g itself.
std::optional<RationalFunction> scaling_of(const Element& image, Symbol g) {
  if (image.size() != 1) return std::nullopt;
  const auto& [w, c] = *image.terms().begin();
  if (w.runs().size() == 1 && w.runs()[0].first == g && w.runs()[0].second == 1) return c;
  return std::nullopt;
}

}  // namespace

Endomorphism Endomorphism::identity(std::shared_ptr<const Algebra> alg, std::string name) {
  return from_images(std::move(alg), std::move(name), {});
}

Endomorphism Endomorphism::from_images(std::shared_ptr<const Algebra> alg, std::string name,
                                       const std::map<Symbol, Element>& images) {
  Endomorphism phi;
  phi.alg_ = alg;
  phi.name_ = std::move(name);
  const auto& gens = alg->generators();
  phi.images_.resize(gens.size());
  for (auto g : gens.generators()) {
    auto it = images.find(g);
    phi.images_[g] = it == images.end() ? alg->letter(g) : it->second;
    auto inv = gens.inverse_of(g);
    if (!inv) continue;
    const Element& img = phi.images_[g];
    if (img.size() != 1) {
      throw Error("image of invertible generator '" + gens.base_name(g) +
                  "' must be a nonzero multiple of an invertible word");
    }
    const auto& [w, c] = *img.terms().begin();
    std::vector<Symbol> inv_letters;
    try {
      inv_letters = inverse_letters(gens, w.letters());
    } catch (const MissingInverse&) {
      throw Error("image of invertible generator '" + gens.base_name(g) +
                  "' must be a nonzero multiple of an invertible word");
    }
    phi.images_[*inv] = alg->normal_form(inv_letters).scaled(c.inverse());
  }
  phi.diagonal_ = true;
  phi.scalars_.resize(gens.size());
  for (std::size_t s = 0; s < gens.size(); ++s) {
    auto c = scaling_of(phi.images_[s], static_cast<Symbol>(s));
    if (!c) {
      phi.diagonal_ = false;
      phi.scalars_.clear();
      break;
    }
    phi.scalars_[s] = *c;
  }
  if (phi.diagonal_) {
    // Scalings invert by inverting the scalars.
    Endomorphism inv;
    inv.alg_ = alg;
    inv.name_ = phi.name_ + "^-1";
    inv.diagonal_ = true;
    inv.images_.resize(gens.size());
    inv.scalars_.resize(gens.size());
    for (std::size_t s = 0; s < gens.size(); ++s) {
      inv.scalars_[s] = phi.scalars_[s].inverse();
      inv.images_[s] = alg->letter(static_cast<Symbol>(s)).scaled(inv.scalars_[s]);
    }
    phi.set_inverse(inv);
  }
  return phi;
}

void Endomorphism::set_inverse(const Endomorphism& inv) {
  auto copy = std::make_shared<Endomorphism>(inv);
  copy->inverse_.reset();
  inverse_ = copy;
}

Element Endomorphism::apply_letters(const std::vector<Symbol>& letters) const {
  if (diagonal_) {
    RationalFunction c(1);
    for (auto s : letters) c *= scalars_[s];
    return alg_->normal_form(letters).scaled(c);
  }
  Element out = alg_->one();
  for (auto s : letters) out = alg_->mul(out, images_[s]);
  return out;
}

Element Endomorphism::apply(const Element& x) const {
  Element out;
  for (const auto& [w, c] : x.terms()) {
    if (diagonal_) {
      // Normal words stay normal under a scaling.
      RationalFunction k = c;
      for (const auto& [s, n] : w.runs()) k *= scalars_[s].pow(static_cast<int>(n));
      out.add_term(w, k);
      continue;
    }
    Element img = alg_->one();
    for (const auto& [s, n] : w.runs()) {
      for (std::uint32_t i = 0; i < n; ++i) img = alg_->mul(img, images_[s]);
    }
    out += img.scaled(c);
  }
  return out;
}

Element Endomorphism::apply(const Combination& c) const {
  Element out;
  for (const auto& t : c.terms) out += apply_letters(t.letters).scaled(t.coeff);
  return out;
}

bool Endomorphism::same_images(const Endomorphism& other) const {
  if (images_.size() != other.images_.size()) return false;
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (!(images_[i] == other.images_[i])) return false;
  }
  return true;
}

Element apply(const Endomorphism& phi, const Element& x) { return phi.apply(x); }

bool verify_respects_relations(const Endomorphism& phi) {
  const Algebra& alg = phi.algebra();
  for (const auto& rel : alg.relations()) {
    if (!(phi.apply(rel.lhs) == phi.apply(rel.rhs))) return false;
  }
  const auto& gens = alg.generators();
  for (auto g : gens.generators()) {
    auto inv = gens.inverse_of(g);
    if (!inv) continue;
    if (!(alg.mul(phi.image(g), phi.image(*inv)) == alg.one())) return false;
    if (!(alg.mul(phi.image(*inv), phi.image(g)) == alg.one())) return false;
  }
  return true;
}

Endomorphism compose(const Endomorphism& phi, const Endomorphism& psi) {
  std::map<Symbol, Element> images;
  for (auto g : phi.algebra().generators().generators()) {
    images.emplace(g, phi.apply(psi.image(g)));
  }
  Endomorphism out =
      Endomorphism::from_images(phi.algebra_ptr(), phi.name() + "*" + psi.name(), images);
  if (!out.declared_inverse() && phi.declared_inverse() && psi.declared_inverse()) {
    out.set_inverse(compose(*psi.declared_inverse(), *phi.declared_inverse()));
  }
  return out;
}

bool verify_inverse(const Endomorphism& phi) {
  const Endomorphism* inv = phi.declared_inverse();
  if (!inv) throw MissingInverse("endomorphism '" + phi.name() + "' has no declared inverse");
  const Algebra& alg = phi.algebra();
  for (std::size_t s = 0; s < alg.generators().size(); ++s) {
    Element g = alg.letter(static_cast<Symbol>(s));
    if (!(phi.apply(inv->apply(g)) == g)) return false;
    if (!(inv->apply(phi.apply(g)) == g)) return false;
  }
  return true;
}

Element derive_apply(const TwistedDerivation& e, const Element& x) {
  const Algebra& alg = e.twist.algebra();
  return alg.mul(e.weight, e.twist.apply(x)) - alg.mul(x, e.weight);
}

std::string to_string(const Endomorphism& phi) {
  const Algebra& alg = phi.algebra();
  std::string out = phi.name() + ":";
  bool first = true;
  for (auto g : alg.generators().generators()) {
    out += first ? " " : ", ";
    first = false;
    out += alg.generators().base_name(g) + " -> " + to_string(phi.image(g), alg);
  }
  return out;
}

}  // namespace ncdiff
