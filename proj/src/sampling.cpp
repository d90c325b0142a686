#include "ncdiff/sampling.hpp"

#include <cstdlib>
#include <string>

namespace ncdiff {

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* env = std::getenv("NCDIFF_SEED");
  if (!env || !*env) return fallback;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    return fallback;
  }
}

std::vector<RationalFunction> default_coefficient_pool(const ParameterSet& params,
                                                       const Bindings& bindings) {
  auto param = [&](const std::string& name, int exponent, long fallback) {
    auto idx = params.find(name);
    if (!idx) return RationalFunction(fallback);
    auto it = bindings.find(static_cast<std::uint32_t>(*idx));
    RationalFunction v = it == bindings.end()
                             ? RationalFunction::parameter(static_cast<std::uint32_t>(*idx))
                             : it->second;
    return v.pow(exponent);
  };
  return {RationalFunction(1), RationalFunction(-1), param("p", 1, 2), param("q", -1, 3)};
}

Element random_element(const Algebra& alg, Rng& rng, const std::vector<RationalFunction>& pool,
                       std::size_t max_length, std::size_t terms) {
  const auto symbols = alg.generators().size();
  std::uniform_int_distribution<std::size_t> len(0, max_length);
  std::uniform_int_distribution<std::size_t> letter(0, symbols - 1);
  std::uniform_int_distribution<std::size_t> coeff(0, pool.size() - 1);
  Combination c;
  for (std::size_t t = 0; t < terms; ++t) {
    std::vector<Symbol> letters(len(rng));
    for (auto& s : letters) s = static_cast<Symbol>(letter(rng));
    c.terms.push_back({pool[coeff(rng)], std::move(letters)});
  }
  return alg.normal_form(c);
}

Point random_point(std::size_t parameter_count, Rng& rng) {
  std::uniform_int_distribution<long> num(-9, 9);
  std::uniform_int_distribution<long> den(1, 7);
  Point pt;
  for (std::size_t i = 0; i < parameter_count; ++i) {
    Rational v;
    do {
      v = Rational(num(rng), den(rng));
      v.canonicalize();
    } while (v == 0 || v == 1 || v == -1);
    pt[static_cast<std::uint32_t>(i)] = v;
  }
  return pt;
}

}  // namespace ncdiff
