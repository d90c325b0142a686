#pragma once

#include <string>

#include "ncdiff/calculus.hpp"
#include "ncdiff/model.hpp"
#include "oracle.hpp"

namespace testing_support {

inline ncdiff::Point point_of(const ncdiff::ParameterSet& params,
                              const std::map<std::string, ncdiff::Rational>& values) {
  ncdiff::Point pt;
  for (const auto& [name, v] : values) {
    if (auto idx = params.find(name)) pt[static_cast<std::uint32_t>(*idx)] = v;
  }
  return pt;
}

// Engine element evaluated at a point, as oracle words of base letters.
inline oracle::Elem to_oracle(const ncdiff::Element& e, const ncdiff::Algebra& alg,
                              const ncdiff::Point& pt) {
  oracle::Elem out;
  for (const auto& [w, c] : e.terms()) {
    std::string letters;
    for (auto s : w.letters()) letters += alg.generators().display_name(s);
    oracle::accumulate(out, letters, ncdiff::rf_eval(c, pt));
  }
  return out;
}

inline oracle::Form to_oracle(const ncdiff::Form& f, const ncdiff::Algebra& alg,
                              const ncdiff::Point& pt) {
  oracle::Form out;
  for (const auto& [tw, coeff] : f.terms()) {
    std::string thetas;
    for (auto t : tw) thetas += static_cast<char>('0' + t);
    for (const auto& [w, c] : to_oracle(coeff, alg, pt)) out[{w, thetas}] += c;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

inline oracle::Form reduce_words(const oracle::Calculus& cal, const oracle::Form& f) {
  oracle::Form out;
  for (const auto& [key, c] : f) {
    for (const auto& [w, cw] : cal.algebra.reduce(key.first)) out[{w, key.second}] += c * cw;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

}  // namespace testing_support
