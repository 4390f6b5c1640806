#include "sysmorse/critical.hpp"

#include <cmath>
#include <numbers>

namespace sysmorse {

namespace {

double orbit_distance(const MarkovPoint& a, const MarkovPoint& b) {
    return (normalize_to_fundamental_domain(a).point.coords() -
            normalize_to_fundamental_domain(b).point.coords())
        .norm();
}

const MarkovPoint kHexagonal{3.0, 3.0, 3.0};
const MarkovPoint kSquare{2.0 * std::numbers::sqrt2, 2.0 * std::numbers::sqrt2, 4.0};

} // namespace

CriticalPoint find_critical(const MarkovPoint& start, const SystParams& params) {
    params.validate();
    MarkovPoint p = normalize_to_fundamental_domain(start).point;
    double gn = 0;
    bool converged = false;
    for (int it = 0; it < tol::newton_max_iter; ++it) {
        SystGradient g = syst_grad(p, params);
        gn = g.tangent.norm();
        if (gn < tol::critical_grad) {
            converged = true;
            break;
        }
        Eigen::Matrix2d H = syst_hessian(p, params);
        Eigen::Vector2d step;
        Eigen::FullPivLU<Eigen::Matrix2d> lu(H);
        if (lu.isInvertible())
            step = lu.solve(-g.tangent);
        else
            step = -g.tangent;
        double sn = step.norm();
        if (sn > 0.5) step *= 0.5 / sn;
        // backtracking on the gradient norm
        bool accepted = false;
        for (int bt = 0; bt < 30; ++bt) {
            MarkovPoint q;
            try {
                q = retract(p.coords() + g.frame.from_frame(step));
            } catch (const error&) {
                step *= 0.5;
                continue;
            }
            double gq = syst_grad(q, params).tangent.norm();
            if (gq < gn) {
                p = q;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }
    if (!converged) {
        // final check in case the last accepted point already qualifies
        gn = syst_grad(p, params).tangent.norm();
        if (gn >= tol::critical_grad)
            throw error(errc::no_convergence, "Newton did not reach the gradient tolerance");
    }

    CriticalPoint cp;
    cp.point = normalize_to_fundamental_domain(p).point;
    cp.T = params.T;
    cp.grad_norm = syst_grad(cp.point, params).tangent.norm();
    Eigen::Matrix2d H = syst_hessian(cp.point, params);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
    cp.hessian_eigs = es.eigenvalues();
    if (std::abs(cp.hessian_eigs[0]) < tol::degeneracy || std::abs(cp.hessian_eigs[1]) < tol::degeneracy)
        throw error(errc::degenerate_hessian, "Hessian eigenvalue below degeneracy tolerance");
    cp.index = (cp.hessian_eigs[0] < 0 ? 1 : 0) + (cp.hessian_eigs[1] < 0 ? 1 : 0);

    // nearest eutactic candidate: the point itself when eutactic, else the
    // census orbits of the once-punctured torus
    std::vector<MarkovPoint> candidates = {kHexagonal, kSquare};
    try {
        if (surface_classify(cp.point).cls.kind == EutKind::eutactic) candidates.insert(candidates.begin(), cp.point);
    } catch (const error&) {
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
        double d = orbit_distance(cp.point, c);
        if (d < best) {
            best = d;
            cp.nearest_eutactic = normalize_to_fundamental_domain(c).point;
            cp.eutactic_distance = d;
        }
    }
    return cp;
}

std::vector<DriftPoint> drift_curve(const MarkovPoint& eutactic, const std::vector<double>& T_list,
                                    const SystParams& base_params) {
    if (surface_classify(eutactic).cls.kind != EutKind::eutactic)
        throw error(errc::not_eutactic, "drift curve requires an eutactic seed");
    for (size_t i = 1; i < T_list.size(); ++i)
        if (!(T_list[i] < T_list[i - 1]))
            throw error(errc::precondition, "T_list must be strictly decreasing");
    MarkovPoint ref = normalize_to_fundamental_domain(eutactic).point;
    std::vector<DriftPoint> out;
    for (double T : T_list) {
        SystParams params = base_params;
        params.T = T;
        CriticalPoint cp = find_critical(ref, params);
        out.push_back({T, orbit_distance(cp.point, ref), cp.index});
    }
    // linear-envelope sanity: drift bounded by a fixed multiple of T and
    // shrinking (up to additive noise floor) as T decreases
    for (const auto& d : out)
        if (d.distance > 10.0 * d.T)
            throw error(errc::no_convergence, "drift exceeds the linear envelope");
    for (size_t i = 1; i < out.size(); ++i)
        if (out[i].distance > out[i - 1].distance + 1e-8)
            throw error(errc::no_convergence, "drift failed to decrease with T");
    return out;
}

Eigen::VectorXd phi_zero_config(const VectorConfig& c, double T) {
    c.validate();
    if (!(T > 0)) throw error(errc::invalid_T, "need T > 0");
    // span coordinates
    Eigen::MatrixXd M = c.matrix();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    double smax = svd.singularValues()[0];
    int k = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > tol::rank_rel * smax) ++k;
    Eigen::MatrixXd B = svd.matrixV().leftCols(k);
    Eigen::MatrixXd W = M * B; // n x k
    Eigen::VectorXd v = Eigen::VectorXd::Zero(k);
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd phi = Eigen::VectorXd::Zero(k);
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < W.rows(); ++i) {
            double w = std::exp(-W.row(i).dot(v) / T);
            phi += w * W.row(i).transpose();
            J -= (w / T) * W.row(i).transpose() * W.row(i);
        }
        if (phi.norm() < 1e-12) return B * v;
        Eigen::VectorXd step = J.fullPivLu().solve(-phi);
        // the line function s -> <Phi(v+s d), d> is strictly monotone, so a
        // plain backtracking Newton is globally convergent here
        double f0 = phi.squaredNorm();
        for (int bt = 0; bt < 60; ++bt) {
            Eigen::VectorXd vn = v + step;
            Eigen::VectorXd pn = Eigen::VectorXd::Zero(k);
            for (int i = 0; i < W.rows(); ++i)
                pn += std::exp(-W.row(i).dot(vn) / T) * W.row(i).transpose();
            if (pn.squaredNorm() < f0) {
                v = vn;
                break;
            }
            step *= 0.5;
        }
    }
    throw error(errc::no_convergence, "phi zero search did not converge");
}

Eigen::Vector2d phi_zero(const MarkovPoint& eutactic, double T) {
    SurfaceClass sc = surface_classify(eutactic);
    if (sc.cls.kind != EutKind::eutactic)
        throw error(errc::not_eutactic, "phi_zero requires an eutactic point");
    Eigen::VectorXd v = phi_zero_config(sc.config, T);
    return {v[0], v[1]};
}

double ring_regularity_scan(const MarkovPoint& eutactic, double T, double rho, double r_p,
                            int samples, const SystParams& base_params) {
    if (!(rho * T < r_p)) throw error(errc::precondition, "need rho*T < r_p");
    if (samples < 1) throw error(errc::precondition, "need samples >= 1");
    SystParams params = base_params;
    params.T = T;
    TangentFrame f = tangent_frame(eutactic);
    const double golden = 2.3999632297286533; // golden angle
    double r0 = rho * T;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        double r = r0 + (r_p - r0) * (k + 0.5) / samples;
        double a = golden * k;
        Vec3 q = eutactic.coords() + r * (std::cos(a) * f.e1 + std::sin(a) * f.e2);
        MarkovPoint m;
        try {
            m = retract(q);
        } catch (const error&) {
            continue; // sample fell off the retraction basin; skip
        }
        best = std::min(best, syst_grad(m, params).tangent.norm());
    }
    return best;
}

} // namespace sysmorse
