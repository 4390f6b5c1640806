#include "sysmorse/flow.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace sysmorse {

namespace {

struct FieldEval {
    Vec3 velocity = Vec3::Zero();
    double syst = 0;
    double l_min = 0;
    double grad_norm = 0; // tangent gradient norm (metric-independent stop)
};

// tangent projection in ambient coordinates; bitwise symmetric under x<->y
Vec3 project_tangent(const MarkovPoint& p, const Vec3& g) {
    Vec3 n = residual_gradient(p);
    n /= n.norm();
    return g - g.dot(n) * n;
}

FieldEval eval_field(const MarkovPoint& p, const SystParams& params, const FlowConfig& cfg) {
    SystGradient g = syst_grad(p, params);
    FieldEval f;
    f.syst = g.value.value;
    Vec3 gt = project_tangent(p, g.ambient);
    f.grad_norm = gt.norm();
    if (cfg.metric == FlowMetric::euclidean) {
        f.velocity = gt;
    } else {
        CoMetric cm = wp_co_metric(p, cfg.wp_trunc);
        TangentFrame fr = g.frame;
        f.velocity = fr.from_frame(cm.G * fr.to_frame(gt));
    }
    if (cfg.direction == FlowDirection::down) f.velocity = -f.velocity;
    // systole from the same evaluation scale
    f.l_min = systole(p).value;
    return f;
}

int match_orbit(const MarkovPoint& p, const std::vector<MarkovPoint>& orbits) {
    MarkovPoint n = normalize_to_fundamental_domain(p).point;
    for (size_t i = 0; i < orbits.size(); ++i)
        if ((n.coords() - orbits[i].coords()).norm() < tol::orbit_match_dist)
            return static_cast<int>(i);
    return -1;
}

} // namespace

Trajectory integrate(const MarkovPoint& start, const SystParams& params, const FlowConfig& config) {
    params.validate();
    Trajectory traj;
    traj.metric = config.metric;
    traj.direction = config.direction;

    MarkovPoint p = retract(start.coords());
    double t = 0.0;
    const double sgn = config.direction == FlowDirection::down ? -1.0 : 1.0;

    for (int step = 0; step < config.max_steps; ++step) {
        FieldEval f = eval_field(p, params, config);
        traj.samples.push_back({t, p, f.syst, f.l_min});

        if (f.l_min < tol::flow_boundary_lmin) {
            traj.terminal = TerminalKind::boundary;
            return traj;
        }
        if (f.grad_norm < tol::flow_grad_stop) {
            traj.terminal = TerminalKind::critical;
            traj.orbit_id = match_orbit(p, config.known_orbits);
            return traj;
        }
        int visit = match_orbit(p, config.known_orbits);
        if (visit >= 0 && step > 0) {
            traj.terminal = TerminalKind::critical;
            traj.orbit_id = visit;
            return traj;
        }

        double vn = f.velocity.norm();
        double dt = std::min(config.dt_max, config.step_scale / vn);
        bool stepped = false;
        while (dt >= tol::flow_min_step) {
            try {
                Vec3 k1 = f.velocity;
                Vec3 k2 = eval_field(retract(p.coords() + 0.5 * dt * k1), params, config).velocity;
                Vec3 k3 = eval_field(retract(p.coords() + 0.5 * dt * k2), params, config).velocity;
                Vec3 k4 = eval_field(retract(p.coords() + dt * k3), params, config).velocity;
                MarkovPoint q = retract(p.coords() + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4));
                double sq = syst_eval(q, params).value;
                // monotone within integrator slack, else retry smaller
                if (sgn * (sq - f.syst) < -tol::flow_monotone_slack) {
                    dt *= 0.5;
                    continue;
                }
                p = q;
                t += dt;
                stepped = true;
                break;
            } catch (const error& e) {
                if (e.code() == errc::retraction_diverged || e.code() == errc::non_hyperbolic) {
                    dt *= 0.5;
                    continue;
                }
                throw;
            }
        }
        if (!stepped) throw error(errc::step_collapse, "adaptive step fell below the floor");
    }
    traj.terminal = TerminalKind::step_limit;
    return traj;
}

DecayFit boundary_decay_rate(const Trajectory& traj) {
    if (traj.terminal != TerminalKind::boundary)
        throw error(errc::precondition, "decay fit requires a boundary trajectory");
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : traj.samples)
        if (s.l_min < 0.2) pts.push_back({s.t, std::log(s.l_min)});
    if (pts.size() < 20)
        throw error(errc::insufficient_samples, "need >= 20 samples with l_min < 0.2");
    double n = static_cast<double>(pts.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (auto [x, y] : pts) {
        st += x;
        sy += y;
        stt += x * x;
        sty += x * y;
    }
    DecayFit fit;
    fit.n = static_cast<int>(pts.size());
    double denom = n * stt - st * st;
    fit.rate = (n * sty - st * sy) / denom;
    fit.intercept = (sy - fit.rate * st) / n;
    double ss_res = 0, ss_tot = 0, mean = sy / n;
    for (auto [x, y] : pts) {
        double e = y - (fit.intercept + fit.rate * x);
        ss_res += e * e;
        ss_tot += (y - mean) * (y - mean);
    }
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
    if (!(fit.rate < 0)) throw error(errc::not_converged, "fitted boundary rate is not negative");
    return fit;
}

namespace {

// coordinate permutations conjugating a mirror symmetry of the point into the
// x<->y swap handled exactly by the softmax accumulation
struct Permutation {
    int idx[3];
    Vec3 apply(const Vec3& v) const { return {v[idx[0]], v[idx[1]], v[idx[2]]}; }
    Permutation inverse() const {
        Permutation inv{};
        for (int i = 0; i < 3; ++i) inv.idx[idx[i]] = i;
        return inv;
    }
};

// mirror axes of the point: pairs (i,j) with coordinates equal to 1e-9
std::vector<std::pair<int, int>> mirror_pairs(const MarkovPoint& p) {
    Vec3 c = p.coords();
    std::vector<std::pair<int, int>> out;
    if (std::abs(c[0] - c[1]) < 1e-9) out.push_back({0, 1});
    if (std::abs(c[1] - c[2]) < 1e-9) out.push_back({1, 2});
    if (std::abs(c[0] - c[2]) < 1e-9) out.push_back({0, 2});
    return out;
}

// exact tangent direction of the fixed locus of the (i,j) mirror at p: the
// invariant vector with equal entries in slots i,j, orthogonal to grad M
Vec3 mirror_axis_direction(const MarkovPoint& p, int i, int j) {
    int k = 3 - i - j;
    Vec3 gm = residual_gradient(p);
    double m = gm[i]; // == gm[j] bitwise at a symmetric point
    double kk = gm[k];
    Vec3 v = Vec3::Zero();
    v[i] = kk;
    v[j] = kk;
    v[k] = -2.0 * m;
    return v / v.norm();
}

} // namespace

std::vector<Trajectory> separatrix_search(const CriticalPoint& high, const SystParams& params,
                                          const FlowConfig& config) {
    if (high.index < 1) throw error(errc::precondition, "separatrix search needs index >= 1");
    const double eps = 1e-5;
    MarkovPoint p0 = high.point;
    TangentFrame fr = tangent_frame(p0);
    Eigen::Matrix2d H = syst_hessian(p0, params);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);

    FlowConfig cfg = config;
    cfg.direction = FlowDirection::down;

    std::vector<Vec3> seeds;
    if (high.index == 1) {
        Eigen::Vector2d v = es.eigenvectors().col(0); // negative eigenvalue direction
        seeds.push_back(fr.from_frame(v));
        seeds.push_back(fr.from_frame(-v));
    } else {
        auto mirrors = mirror_pairs(p0);
        for (int k = 0; k < 36; ++k) {
            double a = 2.0 * std::numbers::pi * k / 36.0;
            Vec3 w = fr.from_frame({std::cos(a), std::sin(a)});
            // snap directions lying on a mirror axis to the exact axis vector
            for (auto [i, j] : mirrors) {
                Vec3 ax = mirror_axis_direction(p0, i, j);
                double c = w.dot(ax);
                if (std::abs(c) > 1.0 - 1e-6) w = c > 0 ? ax : Vec3(-ax);
            }
            seeds.push_back(w);
        }
    }

    std::vector<Trajectory> out;
    for (const Vec3& dir : seeds) {
        // conjugate (1,2)/(0,2) mirror seeds into the exactly-summed (0,1)
        // mirror by a coordinate permutation
        Permutation perm{{0, 1, 2}};
        if (std::abs(dir[1] - dir[2]) < 1e-15 && std::abs(dir[0] - dir[1]) > 1e-12)
            perm = Permutation{{1, 2, 0}};
        else if (std::abs(dir[0] - dir[2]) < 1e-15 && std::abs(dir[0] - dir[1]) > 1e-12)
            perm = Permutation{{0, 2, 1}};
        Permutation inv = perm.inverse();

        Vec3 seed_pt = p0.coords() + eps * dir;
        MarkovPoint start = MarkovPoint::from_coords(perm.apply(seed_pt));
        Trajectory tr = integrate(start, params, cfg);
        for (auto& s : tr.samples) s.point = MarkovPoint::from_coords(inv.apply(s.point.coords()));
        out.push_back(std::move(tr));
    }
    return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    out << "t,x,y,z,syst,l_min\n";
    char buf[256];
    for (const auto& s : traj.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.point.x,
                      s.point.y, s.point.z, s.syst, s.l_min);
        out << buf;
    }
}

void write_flow_svg(const std::vector<Trajectory>& trajs, const std::string& path) {
    // project onto (x,y); fixed viewport around the fundamental domain
    double xmin = 2.0, xmax = 5.0, ymin = 2.0, ymax = 5.0;
    for (const auto& tr : trajs)
        for (const auto& s : tr.samples) {
            xmax = std::max(xmax, s.point.x + 0.2);
            ymax = std::max(ymax, s.point.y + 0.2);
        }
    const int W = 640, Hpx = 640;
    auto X = [&](double x) { return (x - xmin) / (xmax - xmin) * W; };
    auto Y = [&](double y) { return Hpx - (y - ymin) / (ymax - ymin) * Hpx; };
    std::ofstream out(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << Hpx << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    // fundamental domain boundary x=y and the cusp side, drawn as guides
    out << "<line x1='" << X(2) << "' y1='" << Y(2) << "' x2='" << X(xmax) << "' y2='" << Y(xmax)
        << "' stroke='#bbb' stroke-dasharray='4'/>\n";
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"};
    int ci = 0;
    for (const auto& tr : trajs) {
        out << "<polyline fill='none' stroke='" << colors[ci++ % 6] << "' stroke-width='1.2' points='";
        for (const auto& s : tr.samples) out << X(s.point.x) << "," << Y(s.point.y) << " ";
        out << "'/>\n";
    }
    // critical orbits of the torus model
    auto dot = [&](double x, double y, const char* fill, const char* label) {
        out << "<circle cx='" << X(x) << "' cy='" << Y(y) << "' r='4' fill='" << fill << "'/>\n";
        out << "<text x='" << X(x) + 6 << "' y='" << Y(y) - 6 << "' font-size='12'>" << label
            << "</text>\n";
    };
    dot(3.0, 3.0, "#000", "hexagonal");
    dot(2.0 * std::numbers::sqrt2, 2.0 * std::numbers::sqrt2, "#555", "square");
    out << "</svg>\n";
}

} // namespace sysmorse
