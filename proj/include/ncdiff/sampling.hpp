#pragma once

// Seeded generators for property checks.

#include <cstdint>
#include <random>
#include <vector>

#include "ncdiff/algebra.hpp"

namespace ncdiff {

using Rng = std::mt19937_64;

// Seed from NCDIFF_SEED if set, otherwise `fallback`.
std::uint64_t seed_from_env(std::uint64_t fallback = 20041207);

// {1, -1, p, q^-1} with the given bindings applied to p and q. Parameters
// that are not declared fall back to small integers.
std::vector<RationalFunction> default_coefficient_pool(const ParameterSet& params,
                                                       const Bindings& bindings = {});

// Sum of `terms` random words of length <= max_length over all symbols,
// each with a coefficient drawn from the pool, brought to normal form.
Element random_element(const Algebra& alg, Rng& rng, const std::vector<RationalFunction>& pool,
                       std::size_t max_length = 3, std::size_t terms = 2);

// Random rational point with small numerators and denominators, avoiding 0
// and +-1 for every parameter.
Point random_point(std::size_t parameter_count, Rng& rng);

}  // namespace ncdiff
