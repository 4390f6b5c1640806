#pragma once

#include <string>
#include <vector>

#include "sysmorse/errors.hpp"

namespace sysmorse {

// Dense integer matrix, row-major; small sizes only.
struct IntMat {
    int rows = 0, cols = 0;
    std::vector<long long> a;

    IntMat() = default;
    IntMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0) {}
    long long& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    long long at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

IntMat mat_mul(const IntMat& A, const IntMat& B);

// diagonal of the Smith normal form (nonnegative, divisibility chain) plus rank
struct SmithResult {
    std::vector<long long> diagonal;
    int rank = 0;
};
SmithResult smith_normal_form(IntMat m);

// Integer Morse chain complex: generators per degree and boundary matrices
// boundaries[k] : C_{k+1} -> C_k with shape (generators[k] x generators[k+1]).
struct MorseComplex {
    std::vector<std::vector<std::string>> generators;
    std::vector<IntMat> boundaries;

    int degrees() const { return static_cast<int>(generators.size()); }
};

struct HomologyResult {
    std::vector<int> betti;
    std::vector<std::vector<long long>> torsion; // per degree, entries > 1
};

// checks matrix shapes and dd = 0 exactly over the integers
void validate(const MorseComplex& c);

HomologyResult homology(const MorseComplex& c);

// The chain complex of the six-sheeted cover of the compactified moduli space
// of once-punctured tori: generators {alpha,beta} in degree 2, {a1,a2,a3} in
// degree 1, {b1,b2,b3} in degree 0.
MorseComplex m11_cover_complex();

int index_additivity(const std::vector<int>& component_indices);

// Signed permutation action of a finite deck group on the chain groups.
struct DeckAction {
    // element e, degree k: signed permutation matrix on generators of degree k
    std::vector<std::vector<IntMat>> elements;
};

// The natural S3 action on m11_cover_complex: b_i permuted, a_i permuted with
// the permutation sign, alpha/beta swapped by odd permutations.
DeckAction m11_deck_action();

// dimensions of the invariant subspaces of H_k(-;Q) under the action
// (transfer-averaged rational homology of the quotient)
std::vector<int> transfer_rational_homology(const MorseComplex& c, const DeckAction& action);

std::string complex_to_json(const MorseComplex& c);
MorseComplex complex_from_json(const std::string& text);

} // namespace sysmorse
