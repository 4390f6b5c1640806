#include "sysmorse/syst.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sysmorse {

namespace {

double min_length(const std::vector<GeodesicEntry>& ents) {
    double m = ents.front().length;
    for (const auto& e : ents) m = std::min(m, e.length);
    return m;
}

// Empirical per-point bin bound: counts in [n,n+1) <= c_p e^n, and covector
// norms <= g_p e^{n/2}, both fitted from the current enumeration with a x4
// safety factor. Combined with the geometric series this certifies the
// dropped tail of the exponential sum.
struct TailFit {
    double c_p = 4.0;
    double g_p = 4.0;
};

TailFit fit_tail(const std::vector<GeodesicEntry>& ents) {
    std::map<int, int> counts;
    std::map<int, double> gmax;
    for (const auto& e : ents) {
        int n = static_cast<int>(std::floor(e.length));
        counts[n] += 1;
        gmax[n] = std::max(gmax[n], e.d_length.norm());
    }
    TailFit f;
    f.c_p = 0;
    f.g_p = 0;
    for (auto [n, c] : counts) f.c_p = std::max(f.c_p, c * std::exp(-double(n)));
    for (auto [n, g] : gmax) f.g_p = std::max(f.g_p, g * std::exp(-0.5 * n));
    f.c_p = 4.0 * std::max(f.c_p, 1.0);
    f.g_p = 4.0 * std::max(f.g_p, 1.0);
    return f;
}

// sum over l >= L of c_p e^n e^{-n/T} (geometric in n)
double tail_sum_bound(double c_p, double L, double T) {
    double rate = 1.0 - 1.0 / T; // negative for T < 1
    double N = std::floor(L);
    return c_p * std::exp(rate * N) / (1.0 - std::exp(rate));
}

// gradient-mass tail: extra factor e^{n/2} from the covector norms
double tail_grad_bound(double c_p, double g_p, double L, double T) {
    double rate = 1.5 - 1.0 / T;
    if (rate >= 0) return std::numeric_limits<double>::infinity();
    double N = std::floor(L);
    return c_p * g_p * std::exp(rate * N) / (1.0 - std::exp(rate));
}

struct Accum {
    double S = 0;                // sum of exp(-(l - lmin)/T)
    Vec3 gbar = Vec3::Zero();    // softmax average of d_length
    Mat3 second = Mat3::Zero();  // softmax average of outer products
    Mat3 hess = Mat3::Zero();    // softmax average of length Hessians
    double lmin = 0;
};

// Softmax accumulation with a deterministic, mirror-paired order: entries are
// grouped under the slope mirror (p,q) <-> (q,p) so that a bitwise x==y state
// produces a bitwise symmetric result (fp addition commutes within a pair).
Accum accumulate(const std::vector<GeodesicEntry>& ents, double T, bool with_hessian) {
    Accum a;
    a.lmin = min_length(ents);
    std::map<std::pair<std::int64_t, std::int64_t>, const GeodesicEntry*> index;
    for (const auto& e : ents) index[{e.slope.p, e.slope.q}] = &e;

    auto weight = [&](const GeodesicEntry& e) { return std::exp(-(e.length - a.lmin) / T); };
    auto add_one = [&](const GeodesicEntry& e, double w) {
        a.gbar += w * e.d_length;
        if (with_hessian) {
            a.second += w * (e.d_length * e.d_length.transpose());
            a.hess += w * e.length_hessian;
        }
    };

    std::vector<const GeodesicEntry*> order;
    order.reserve(ents.size());
    std::vector<char> done(ents.size(), 0);
    for (size_t i = 0; i < ents.size(); ++i) {
        if (done[i]) continue;
        const auto& e = ents[i];
        Slope m = e.slope.mirrored();
        done[i] = 1;
        auto it = index.find({m.p, m.q});
        if (m == e.slope || it == index.end()) {
            double w = weight(e);
            a.S += w;
            add_one(e, w);
        } else {
            const GeodesicEntry& f = *it->second;
            size_t j = static_cast<size_t>(&f - ents.data());
            done[j] = 1;
            double w1 = weight(e), w2 = weight(f);
            a.S += (w1 + w2);
            a.gbar += (w1 * e.d_length + w2 * f.d_length);
            if (with_hessian) {
                a.second += (w1 * (e.d_length * e.d_length.transpose()) +
                             w2 * (f.d_length * f.d_length.transpose()));
                a.hess += (w1 * e.length_hessian + w2 * f.length_hessian);
            }
        }
    }
    a.gbar /= a.S;
    if (with_hessian) {
        a.second /= a.S;
        a.hess /= a.S;
    }
    return a;
}

struct Evaluation {
    std::vector<GeodesicEntry> ents;
    Accum acc;
    SystValue value;
    double grad_tail = 0;
};

Evaluation evaluate(const MarkovPoint& p, const SystParams& params, bool need_grad,
                    bool need_hessian) {
    params.validate();
    const double T = params.T;

    // systole estimate from a coarse enumeration; the window always covers
    // the second systole so the sum never degenerates to a single term
    double tmin = std::min({p.x, p.y, p.z});
    double lsys_hint = length_of_trace(tmin);
    double secsys_hint = second_systole(p);

    double L = std::max(lsys_hint + std::max(1.5, T * std::log(4.0 / params.tail_tol)),
                        secsys_hint + 0.5);
    EnumerateOptions opts;
    opts.with_hessian = need_hessian;
    for (int rounds = 0; rounds < 64; ++rounds) {
        if (L > params.cutoff_cap)
            throw error(errc::cutoff_cap_exceeded, "tail tolerance unreachable below cutoff_cap");
        auto ents = enumerate_geodesics(p, L, opts);
        double lmin = min_length(ents);
        TailFit fit = fit_tail(ents);
        double tailS = tail_sum_bound(fit.c_p, L, T);
        // S in units of exp(-lmin/T)
        double S = 0;
        for (const auto& e : ents) S += std::exp(-(e.length - lmin) / T);
        double tail_rel = tailS / (S * std::exp(-lmin / T));
        double value_tail = T * tail_rel; // |value error| <= T log(1+rel) <= T rel
        double grad_tail = 0;
        if (need_grad || need_hessian) {
            double tailG = tail_grad_bound(fit.c_p, fit.g_p, L, T);
            grad_tail = tailG / (S * std::exp(-lmin / T));
        }
        if (value_tail < params.tail_tol && (!std::isinf(grad_tail))) {
            Evaluation ev;
            ev.acc = accumulate(ents, T, need_hessian);
            ev.value.value = lmin - T * std::log(ev.acc.S);
            ev.value.count = static_cast<int>(ents.size());
            ev.value.cutoff_used = L;
            ev.value.tail_bound = value_tail;
            ev.grad_tail = grad_tail;
            ev.ents = std::move(ents);
            return ev;
        }
        L += std::max(1.0, T * std::log(1.0 / params.tail_tol) / 4.0);
    }
    throw error(errc::cutoff_cap_exceeded, "adaptive cutoff did not certify the tail");
}

} // namespace

Systole systole(const MarkovPoint& p) {
    double tmin = std::min({p.x, p.y, p.z});
    double L = length_of_trace(tmin) + 1e-6;
    auto ents = enumerate_geodesics(p, L);
    double lmin = min_length(ents);
    Systole s;
    s.value = lmin;
    for (const auto& e : ents)
        if (e.length <= lmin + tol::length_equality) s.minimizers.push_back(e.slope);
    return s;
}

double second_systole(const MarkovPoint& p) {
    double tmin = std::min({p.x, p.y, p.z});
    double L = length_of_trace(tmin) + 1.0;
    for (int rounds = 0; rounds < 32; ++rounds) {
        auto ents = enumerate_geodesics(p, L);
        double lmin = min_length(ents);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& e : ents)
            if (e.length > lmin + tol::length_equality) best = std::min(best, e.length);
        if (best <= L - 0.5) return best; // inside the enumerated window, trustworthy
        L += std::max(2.0, L * 0.5);
    }
    throw error(errc::cutoff_cap_exceeded, "second systole not found below cutoff");
}

SystValue syst_eval(const MarkovPoint& p, const SystParams& params) {
    return evaluate(p, params, false, false).value;
}

SystGradient syst_grad(const MarkovPoint& p, const SystParams& params) {
    auto ev = evaluate(p, params, true, false);
    SystGradient g;
    g.ambient = ev.acc.gbar;
    g.frame = tangent_frame(p);
    g.tangent = g.frame.to_frame(g.ambient);
    g.tail_bound = ev.grad_tail;
    g.value = ev.value;
    return g;
}

Eigen::Matrix2d syst_hessian(const MarkovPoint& p, const SystParams& params) {
    auto ev = evaluate(p, params, true, true);
    const auto& a = ev.acc;
    Mat3 cov = a.second - a.gbar * a.gbar.transpose();
    Mat3 ambient = a.hess - cov / params.T;
    // curvature correction: subtract the normal multiplier times Hess(residual)
    Vec3 gm = residual_gradient(p);
    double lambda = a.gbar.dot(gm) / gm.squaredNorm();
    Mat3 restricted = ambient - lambda * residual_hessian(p);
    TangentFrame f = tangent_frame(p);
    Eigen::Matrix2d H;
    H(0, 0) = f.e1.dot(restricted * f.e1);
    H(1, 1) = f.e2.dot(restricted * f.e2);
    H(0, 1) = H(1, 0) = 0.5 * (f.e1.dot(restricted * f.e2) + f.e2.dot(restricted * f.e1));
    return H;
}

double syst_gap_to_sys(const MarkovPoint& p, const SystParams& params) {
    auto ev = evaluate(p, params, false, false);
    double sys = systole(p).value;
    // split the sum into minimizers (weight 1 each) and the strictly longer
    // tail; log1p keeps the gap strictly positive however small the tail is
    long r = 0;
    double eps = 0;
    for (const auto& e : ev.ents) {
        if (e.length <= sys + tol::length_equality)
            ++r;
        else
            eps += std::exp(-(e.length - sys) / params.T);
    }
    return params.T * std::log1p(static_cast<double>(r - 1) + eps);
}

double syst_nodal_eval(const NodalSurface& n, double T) {
    if (!(T > 0.0) || !(T < 1.0)) throw error(errc::invalid_T, "need 0 < T < 1");
    if (n.nodes < 1) throw error(errc::precondition, "nodal surface needs s >= 1");
    double sum = static_cast<double>(n.nodes);
    for (const auto& c : n.component_syst)
        if (c) sum += std::exp(-*c / T);
    return -T * std::log(sum);
}

std::vector<double> nodal_hessian_spectrum(const std::vector<std::vector<double>>& component_spectra,
                                           int nodes) {
    if (nodes < 1) throw error(errc::precondition, "nodal surface needs s >= 1");
    std::vector<double> eigs;
    for (int i = 0; i < nodes; ++i) {
        eigs.push_back(2.0);
        eigs.push_back(2.0);
    }
    for (const auto& c : component_spectra) eigs.insert(eigs.end(), c.begin(), c.end());
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

} // namespace sysmorse
