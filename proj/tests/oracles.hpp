#pragma once

// Test-side oracles, kept independent of the library's computation paths:
// geodesic census via explicit holonomy-word matrices, eutacticity via an
// exact rational convex-hull test, and deterministic domain sampling.

#include <Eigen/Dense>
#include <map>
#include <random>
#include <vector>

#include "sysmorse/eutactic.hpp"
#include "sysmorse/markov.hpp"

namespace oracles {

// (slope -> |trace|) for every slope with |p| <= word_bound, q <= word_bound
// and trace below the cutoff; traces from multiplied holonomy matrices of
// Christoffel words.
std::map<std::pair<long long, long long>, double> holonomy_census(const sysmorse::MarkovPoint& p,
                                                                  double trace_cutoff,
                                                                  int word_bound);

enum class HullClass { eutactic, semi_eutactic, biased };

// exact rational classification of an integer vector configuration:
// Caratheodory subset enumeration for hull membership, extreme-ray
// enumeration for supporting normals
HullClass exact_hull_classify(const std::vector<std::vector<long long>>& vecs);

// deterministic fundamental-domain sample (normalized triples)
sysmorse::MarkovPoint sample_domain_point(std::mt19937_64& rng, double thick = 2.05);

// value-based second-difference of f(retract(p + h u)); equals the
// constraint-restricted Hessian in direction u
double second_difference(const sysmorse::MarkovPoint& p, const sysmorse::Vec3& u, double h,
                         const std::function<double(const sysmorse::MarkovPoint&)>& f);

} // namespace oracles
