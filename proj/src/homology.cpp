#include "sysmorse/homology.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

namespace sysmorse {

IntMat mat_mul(const IntMat& A, const IntMat& B) {
    if (A.cols != B.rows) throw error(errc::shape_mismatch, "matrix product shape mismatch");
    IntMat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            long long v = A.at(i, k);
            if (v == 0) continue;
            for (int j = 0; j < B.cols; ++j) C.at(i, j) += v * B.at(k, j);
        }
    return C;
}

SmithResult smith_normal_form(IntMat m) {
    const int n = std::min(m.rows, m.cols);
    SmithResult res;
    for (int s = 0; s < n; ++s) {
        // find the smallest nonzero entry in the lower-right block
        int pr = -1, pc = -1;
        long long best = 0;
        for (int i = s; i < m.rows; ++i)
            for (int j = s; j < m.cols; ++j) {
                long long v = std::llabs(m.at(i, j));
                if (v != 0 && (best == 0 || v < best)) {
                    best = v;
                    pr = i;
                    pc = j;
                }
            }
        if (pr < 0) break;
        for (int j = 0; j < m.cols; ++j) std::swap(m.at(s, j), m.at(pr, j));
        for (int i = 0; i < m.rows; ++i) std::swap(m.at(i, s), m.at(i, pc));
        bool again = true;
        while (again) {
            again = false;
            for (int i = s + 1; i < m.rows; ++i) {
                long long q = m.at(i, s) / m.at(s, s);
                if (q != 0)
                    for (int j = 0; j < m.cols; ++j) m.at(i, j) -= q * m.at(s, j);
                if (m.at(i, s) != 0) {
                    // remainder smaller than pivot: swap rows and restart
                    for (int j = 0; j < m.cols; ++j) std::swap(m.at(s, j), m.at(i, j));
                    again = true;
                }
            }
            for (int j = s + 1; j < m.cols; ++j) {
                long long q = m.at(s, j) / m.at(s, s);
                if (q != 0)
                    for (int i = 0; i < m.rows; ++i) m.at(i, j) -= q * m.at(i, s);
                if (m.at(s, j) != 0) {
                    for (int i = 0; i < m.rows; ++i) std::swap(m.at(i, s), m.at(i, j));
                    again = true;
                }
            }
        }
        // divisibility: fold a non-multiple into the pivot column and redo
        for (int i = s + 1; i < m.rows; ++i)
            for (int j = s + 1; j < m.cols; ++j)
                if (m.at(i, j) % m.at(s, s) != 0) {
                    for (int jc = 0; jc < m.cols; ++jc) m.at(s, jc) += m.at(i, jc);
                    --s;
                    i = m.rows;
                    break;
                }
    }
    for (int s = 0; s < n; ++s) {
        long long v = std::llabs(m.at(s, s));
        if (v == 0) break;
        res.diagonal.push_back(v);
        ++res.rank;
    }
    return res;
}

void validate(const MorseComplex& c) {
    int deg = c.degrees();
    if (static_cast<int>(c.boundaries.size()) != std::max(0, deg - 1))
        throw error(errc::shape_mismatch, "boundary count must be degrees-1");
    for (int k = 0; k + 1 < deg; ++k) {
        const IntMat& d = c.boundaries[k];
        if (d.rows != static_cast<int>(c.generators[k].size()) ||
            d.cols != static_cast<int>(c.generators[k + 1].size()))
            throw error(errc::shape_mismatch, "boundary shape does not match generator counts");
    }
    for (int k = 0; k + 2 < deg; ++k) {
        IntMat prod = mat_mul(c.boundaries[k], c.boundaries[k + 1]);
        for (long long v : prod.a)
            if (v != 0) throw error(errc::shape_mismatch, "dd != 0");
    }
}

HomologyResult homology(const MorseComplex& c) {
    validate(c);
    int deg = c.degrees();
    std::vector<int> rank(deg + 1, 0);
    std::vector<std::vector<long long>> tors(deg);
    for (int k = 0; k + 1 < deg; ++k) {
        SmithResult s = smith_normal_form(c.boundaries[k]);
        rank[k + 1] = s.rank; // rank of d_{k+1}
        for (long long v : s.diagonal)
            if (v > 1) tors[k].push_back(v);
    }
    HomologyResult out;
    out.torsion = tors;
    for (int k = 0; k < deg; ++k) {
        int nk = static_cast<int>(c.generators[k].size());
        out.betti.push_back(nk - rank[k] - rank[k + 1]);
    }
    return out;
}

MorseComplex m11_cover_complex() {
    MorseComplex c;
    c.generators = {{"b1", "b2", "b3"}, {"a1", "a2", "a3"}, {"alpha", "beta"}};
    IntMat d1(3, 3); // columns a1,a2,a3 in basis b1,b2,b3
    // d a1 = b2 - b3 ; d a2 = b3 - b1 ; d a3 = b1 - b2
    d1.at(1, 0) = 1;
    d1.at(2, 0) = -1;
    d1.at(2, 1) = 1;
    d1.at(0, 1) = -1;
    d1.at(0, 2) = 1;
    d1.at(1, 2) = -1;
    IntMat d2(3, 2); // columns alpha, beta in basis a1,a2,a3
    for (int i = 0; i < 3; ++i) {
        d2.at(i, 0) = 1;
        d2.at(i, 1) = -1;
    }
    c.boundaries = {d1, d2};
    return c;
}

int index_additivity(const std::vector<int>& component_indices) {
    int total = 0;
    for (int i : component_indices) {
        if (i < 0) throw error(errc::precondition, "component index must be nonnegative");
        total += i;
    }
    return total;
}

DeckAction m11_deck_action() {
    // permutations of {0,1,2} as (image, sign)
    const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
    const int signs[6] = {1, 1, 1, -1, -1, -1};
    DeckAction act;
    for (int e = 0; e < 6; ++e) {
        IntMat m0(3, 3), m1(3, 3), m2(2, 2);
        for (int i = 0; i < 3; ++i) {
            m0.at(perms[e][i], i) = 1;              // b_i -> b_{sigma(i)}
            m1.at(perms[e][i], i) = signs[e];       // a_i -> sgn(sigma) a_{sigma(i)}
        }
        if (signs[e] == 1) {
            m2.at(0, 0) = 1;
            m2.at(1, 1) = 1;
        } else {
            m2.at(0, 1) = 1; // alpha <-> beta
            m2.at(1, 0) = 1;
        }
        act.elements.push_back({m0, m1, m2});
    }
    return act;
}

namespace {

Eigen::MatrixXd to_eigen(const IntMat& m) {
    Eigen::MatrixXd M(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) M(i, j) = static_cast<double>(m.at(i, j));
    return M;
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& M) {
    if (M.rows() == 0) return Eigen::MatrixXd::Identity(M.cols(), M.cols());
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-9);
    if (lu.rank() == M.cols()) return Eigen::MatrixXd::Zero(M.cols(), 0);
    return lu.kernel();
}

} // namespace

std::vector<int> transfer_rational_homology(const MorseComplex& c, const DeckAction& action) {
    validate(c);
    int deg = c.degrees();
    std::vector<int> dims;
    for (int k = 0; k < deg; ++k) {
        int nk = static_cast<int>(c.generators[k].size());
        Eigen::MatrixXd dk = k > 0 ? to_eigen(c.boundaries[k - 1])
                                   : Eigen::MatrixXd::Zero(0, nk); // d_k : C_k -> C_{k-1}
        Eigen::MatrixXd dk1 = k + 1 < deg ? to_eigen(c.boundaries[k])
                                          : Eigen::MatrixXd::Zero(nk, 0); // d_{k+1}
        Eigen::MatrixXd Z = kernel_basis(dk); // cycles, nk x z
        if (Z.cols() == 0) {
            dims.push_back(0);
            continue;
        }
        // quotient basis: project the image out of the cycle coordinates.
        // coordinates of im(d_{k+1}) in the cycle basis
        Eigen::MatrixXd B = Z.colPivHouseholderQr().solve(dk1); // z x n_{k+1}
        Eigen::FullPivLU<Eigen::MatrixXd> lub(B);
        lub.setThreshold(1e-9);
        long zr = Z.cols();
        long br = lub.rank();
        // complement of im within cycles: columns of Z orthogonal-complemented
        // via least squares each group element's induced action, traced on H_k
        // H_k basis: pick a complement using the LU image
        Eigen::MatrixXd img = lub.image(B); // z x br
        // projector onto complement of img inside R^z
        Eigen::MatrixXd P = Eigen::MatrixXd::Identity(zr, zr);
        if (br > 0) {
            Eigen::MatrixXd Q = img.householderQr().householderQ() *
                                Eigen::MatrixXd::Identity(zr, br);
            P -= Q * Q.transpose();
        }
        // average trace of the action on H_k = ker/im
        double avg = 0;
        for (const auto& el : action.elements) {
            Eigen::MatrixXd g = to_eigen(el[k]); // action on C_k
            // induced on cycle coords
            Eigen::MatrixXd gz = Z.colPivHouseholderQr().solve(g * Z); // z x z
            // trace on the quotient: trace(P gz) with P the complement projector
            avg += (P * gz).trace();
        }
        avg /= static_cast<double>(action.elements.size());
        dims.push_back(static_cast<int>(std::lround(avg)));
    }
    return dims;
}

std::string complex_to_json(const MorseComplex& c) {
    nlohmann::ordered_json j;
    std::vector<int> degrees;
    for (const auto& g : c.generators) degrees.push_back(static_cast<int>(g.size()));
    j["degrees"] = degrees;
    j["generators"] = c.generators;
    auto& bounds = j["boundaries"] = nlohmann::ordered_json::array();
    for (const auto& b : c.boundaries) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (int i = 0; i < b.rows; ++i) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (int jx = 0; jx < b.cols; ++jx) row.push_back(b.at(i, jx));
            rows.push_back(row);
        }
        bounds.push_back(rows);
    }
    return j.dump(2);
}

MorseComplex complex_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    MorseComplex c;
    std::vector<int> degrees = j.at("degrees").get<std::vector<int>>();
    if (j.contains("generators")) {
        c.generators = j.at("generators").get<std::vector<std::vector<std::string>>>();
    } else {
        for (size_t k = 0; k < degrees.size(); ++k) {
            std::vector<std::string> names;
            for (int i = 0; i < degrees[k]; ++i)
                names.push_back("g" + std::to_string(k) + "_" + std::to_string(i));
            c.generators.push_back(names);
        }
    }
    for (const auto& rows : j.at("boundaries")) {
        int r = static_cast<int>(rows.size());
        int cc = r > 0 ? static_cast<int>(rows[0].size()) : 0;
        IntMat m(r, cc);
        for (int i = 0; i < r; ++i) {
            if (static_cast<int>(rows[i].size()) != cc)
                throw error(errc::shape_mismatch, "ragged boundary matrix");
            for (int jx = 0; jx < cc; ++jx) m.at(i, jx) = rows[i][jx].get<long long>();
        }
        c.boundaries.push_back(std::move(m));
    }
    validate(c);
    return c;
}

} // namespace sysmorse
