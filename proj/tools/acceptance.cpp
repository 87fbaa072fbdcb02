// Acceptance gate: one pass/fail line per top-level requirement, nonzero
// exit when any line fails. Everything runs from scratch in-process; the
// slowest block (the full reconstruction protocol) is budgeted at five
// minutes on a laptop-class core.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <random>
#include <string>
#include <vector>

#include "solver_instances.hpp"
#include "solver_reference.hpp"
#include "vft/config.hpp"
#include "vft/forward.hpp"
#include "vft/geometry.hpp"
#include "vft/inverse.hpp"
#include "vft/metrics.hpp"
#include "vft/ray.hpp"
#include "vft/runner.hpp"

using namespace vft;

namespace {

int g_failures = 0;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

void report(bool ok, const std::string& label, const std::string& detail,
            double seconds) {
    if (!ok) ++g_failures;
    std::printf("[%s] %s: %s (%.1f s)\n", ok ? "PASS" : "FAIL", label.c_str(),
                detail.c_str(), seconds);
    std::fflush(stdout);
}

template <typename Fn>
void criterion(const std::string& label, Fn&& fn) {
    const double t0 = now_seconds();
    try {
        auto [ok, detail] = fn();
        report(ok, label, detail, now_seconds() - t0);
    } catch (const std::exception& err) {
        report(false, label, std::string("exception: ") + err.what(),
               now_seconds() - t0);
    }
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return buf;
}

NodalField sample_affine(const TriMesh& mesh, const double a[3],
                         const double b[3]) {
    NodalField f(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        const Point2 p = mesh.nodes[i];
        f.values[i] = a[0] + a[1] * p.x + a[2] * p.y;
        f.values[mesh.num_nodes() + i] = b[0] + b[1] * p.x + b[2] * p.y;
    }
    return f;
}

NodalField rotate_minus90(const NodalField& f) {
    const int n = f.num_nodes();
    NodalField out(n);
    out.values.head(n) = f.values.tail(n);
    out.values.tail(n) = -f.values.head(n);
    return out;
}

// --- criteria -------------------------------------------------------------

std::pair<bool, std::string> chord_count() {
    TriMesh mesh = build_disk_mesh(1.0, 1.0 / 15);
    ElectrodeLayout layout = place_electrodes(mesh, 32);
    const auto chords = enumerate_chords(layout, mesh);
    return {chords.size() == 496,
            fmt("32 electrodes give %zu chords, want 496", chords.size())};
}

std::pair<bool, std::string> ray_exactness() {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double worst_long = 0.0, worst_trans = 0.0, worst_rot = 0.0;
    for (auto [h, n] : {std::pair<double, int>{1.0 / 6, 12}, {1.0 / 10, 16}}) {
        TriMesh mesh = build_disk_mesh(1.0, h);
        ElectrodeLayout layout = place_electrodes(mesh, n);
        const auto chords = enumerate_chords(layout, mesh);
        RayMatrix rl = assemble(mesh, chords, RayFlavor::Longitudinal);
        RayMatrix rt = assemble(mesh, chords, RayFlavor::Transverse);
        for (int trial = 0; trial < 5; ++trial) {
            double a[3], b[3];
            for (int k = 0; k < 3; ++k) {
                a[k] = unit(rng);
                b[k] = unit(rng);
            }
            NodalField e = sample_affine(mesh, a, b);
            Eigen::VectorXd got_l = apply(rl, e);
            Eigen::VectorXd got_t = apply(rt, e);
            Eigen::VectorXd got_r = apply(rl, rotate_minus90(e));
            for (size_t i = 0; i < chords.size(); ++i) {
                const Chord& c = chords[i];
                const Point2 na = mesh.nodes[layout.node_ids[c.endpoints.first]];
                const Point2 nb = mesh.nodes[layout.node_ids[c.endpoints.second]];
                const Point2 mid = 0.5 * (na + nb);
                const double ex = a[0] + a[1] * mid.x + a[2] * mid.y;
                const double ey = b[0] + b[1] * mid.x + b[2] * mid.y;
                const double len = norm(nb - na);
                const double want_l = len * (c.s_hat.x * ex + c.s_hat.y * ey);
                const double want_t = len * (c.s_perp.x * ex + c.s_perp.y * ey);
                worst_long = std::max(worst_long, std::abs(got_l[i] - want_l) /
                                                      std::max(1.0, std::abs(want_l)));
                worst_trans = std::max(worst_trans, std::abs(got_t[i] - want_t) /
                                                        std::max(1.0, std::abs(want_t)));
                worst_rot = std::max(worst_rot, std::abs(got_t[i] - got_r[i]) /
                                                    std::max(1.0, std::abs(got_t[i])));
            }
        }
    }
    const bool ok = worst_long <= 1e-10 && worst_trans <= 1e-10 &&
                    worst_rot <= 1e-12;
    return {ok, fmt("affine rel err %.1e longitudinal / %.1e transverse, "
                    "rotation identity %.1e",
                    worst_long, worst_trans, worst_rot)};
}

std::pair<bool, std::string> endpoint_identity() {
    // u = x: the longitudinal operator applied to -grad u reproduces the
    // electrode potential differences exactly.
    TriMesh mesh = build_disk_mesh(1.0, 1.0 / 10);
    ElectrodeLayout layout = place_electrodes(mesh, 32);
    const auto chords = enumerate_chords(layout, mesh);
    RayMatrix rl = assemble(mesh, chords, RayFlavor::Longitudinal);
    const double ax[3] = {-1.0, 0.0, 0.0}, ay[3] = {0.0, 0.0, 0.0};
    Eigen::VectorXd got = apply(rl, sample_affine(mesh, ax, ay));
    double worst_exact = 0.0;
    for (size_t i = 0; i < chords.size(); ++i) {
        const Point2 na = mesh.nodes[layout.node_ids[chords[i].endpoints.first]];
        const Point2 nb = mesh.nodes[layout.node_ids[chords[i].endpoints.second]];
        worst_exact = std::max(worst_exact, std::abs(got[i] - (na.x - nb.x)));
    }

    // u = x^2 + y^2 with the recovered nodal gradient: halving h halves the
    // worst endpoint mismatch twice (second order).
    auto max_err = [](int rings_per_unit) {
        TriMesh m = build_disk_mesh(1.0, 1.0 / rings_per_unit);
        ElectrodeLayout el = place_electrodes(m, 16);
        const auto ch = enumerate_chords(el, m);
        RayMatrix r = assemble(m, ch, RayFlavor::Longitudinal);
        PotentialField u;
        u.u.resize(m.num_nodes());
        for (int i = 0; i < m.num_nodes(); ++i) {
            const Point2 p = m.nodes[i];
            u.u[i] = p.x * p.x + p.y * p.y;
        }
        NodalField e = gradient_field(m, u);
        Eigen::VectorXd got2 = apply(r, e);
        double worst = 0.0;
        for (size_t i = 0; i < ch.size(); ++i) {
            const Point2 na = m.nodes[el.node_ids[ch[i].endpoints.first]];
            const Point2 nb = m.nodes[el.node_ids[ch[i].endpoints.second]];
            const double want = (na.x * na.x + na.y * na.y) -
                                (nb.x * nb.x + nb.y * nb.y);
            worst = std::max(worst, std::abs(got2[i] - want));
        }
        return worst;
    };
    const double e1 = max_err(8), e2 = max_err(16);
    const double order = std::log2(e1 / e2);
    const bool ok = worst_exact <= 1e-12 && order >= 1.7 && order <= 2.3;
    return {ok, fmt("u=x max err %.1e; u=x^2+y^2 order %.2f between h and h/2",
                    worst_exact, order)};
}

std::pair<bool, std::string> forward_oracle() {
    auto rel_l2 = [](int rings_per_unit) {
        TriMesh mesh = build_disk_mesh(1.0, 1.0 / rings_per_unit);
        PotentialField u = solve_potential(mesh, {{0.0, 0.0}, {1.0, 0.0}});
        double num = 0.0, den = 0.0;
        for (int id : mesh.boundary_nodes) {
            const double want = std::cos(polar_angle(mesh.nodes[id])) / M_PI;
            const double diff = u.u[id] - want;
            num += diff * diff;
            den += want * want;
        }
        return std::sqrt(num / den);
    };
    TriMesh coarse = build_disk_mesh(1.0, 1.0 / 31);
    TriMesh fine = build_disk_mesh(1.0, 1.0 / 63);
    const double err_c = rel_l2(31), err_f = rel_l2(63);
    const bool ok = err_c < 0.05 && err_f < 0.02;
    return {ok, fmt("boundary trace vs analytic: rel L2 %.2f%% at %d nodes, "
                    "%.2f%% at %d nodes",
                    100.0 * err_c, coarse.num_nodes(), 100.0 * err_f,
                    fine.num_nodes())};
}

std::pair<bool, std::string> solver_oracle() {
    double worst = 0.0;
    for (int i = 0; i < vft_test::kNumSolverInstances; ++i) {
        vft_test::SolverInstance si = vft_test::make_solver_instance(i);
        auto [e, rep] = solve(si.r_long, si.r_trans, si.weights, si.data,
                              si.alpha, si.beta);
        const double ref = vft_test::kReferenceObjectives[i];
        worst = std::max(worst, std::abs(rep.objective - ref) / std::abs(ref));
    }
    return {worst <= 1e-6,
            fmt("max objective deviation %.1e over 20 instances vs the "
                "independent reference",
                worst)};
}

// Shared state for the four protocol runs (two orientations, two levels).
struct ProtocolRun {
    double mr_mean = 0.0;       // per-realization metric means
    double cs_mean = 0.0;
    double loc_error_avg = 0.0;  // metrics of the averaged field
    double max_mag_ratio_avg = 0.0;
    double worst_sparse_frac = 0.0;  // worst realization at this level
};

struct ProtocolOut {
    ProtocolRun radial40, radial20, tangential40, tangential20;
    double coarse_edge = 0.0;
};

ProtocolOut run_protocol() {
    ExperimentConfig cfg;
    cfg.fine_h = 1.0 / 30;
    cfg.coarse_h = 1.0 / 15;
    cfg.dipole_x = 0.6;
    ProblemGeometry g = build_problem_geometry(cfg);

    RayMatrix rl = assemble(g.coarse, g.chords, RayFlavor::Longitudinal);
    RayMatrix rt = assemble(g.coarse, g.chords, RayFlavor::Transverse);
    PenaltyWeights weights = build_weights(rl, build_laplacian(g.coarse));
    FieldSolver solver(rl, rt, weights, cfg.alpha, cfg.beta);
    const Point2 location{cfg.dipole_x, cfg.dipole_y};

    ProtocolOut out;
    out.coarse_edge = max_edge_length(g.coarse);

    bool calibrated = false;
    auto run_one = [&](Point2 q, double snr_db) {
        DipoleSource src{location, q};
        PotentialField u = solve_potential(g.fine, src);
        NodalField e_true = project(build_projection(g.fine, g.coarse), g.fine,
                                    gradient_field(g.fine, u));
        Eigen::VectorXd clean = longitudinal_data(u, g.electrodes_fine, g.chords);

        ProtocolRun run;
        Eigen::VectorXd avg = Eigen::VectorXd::Zero(2 * g.coarse.num_nodes());
        for (int k = 0; k < cfg.realizations; ++k) {
            Eigen::VectorXd noisy =
                add_noise(clean, snr_db,
                          static_cast<unsigned long long>(cfg.seed + k))
                    .first;
            if (!calibrated) {
                solver.calibrate(noisy);
                calibrated = true;
            }
            auto [e_hat, rep] = solver.solve(noisy);
            avg += e_hat.values;
            EvalResult ev = evaluate_fields(g.coarse, e_hat, e_true, location);
            run.mr_mean += ev.mr / cfg.realizations;
            run.cs_mean += ev.cs / cfg.realizations;

            Eigen::VectorXd prof = transverse_profile(rt, e_hat).cwiseAbs();
            const double cut = 0.05 * prof.maxCoeff();
            const double frac =
                (prof.array() > cut).count() / static_cast<double>(prof.size());
            run.worst_sparse_frac = std::max(run.worst_sparse_frac, frac);
        }
        NodalField e_avg;
        e_avg.values = avg / cfg.realizations;
        EvalResult ev = evaluate_fields(g.coarse, e_avg, e_true, location);
        run.loc_error_avg = ev.loc_error;
        run.max_mag_ratio_avg = ev.max_mag_ratio;
        return run;
    };

    out.radial40 = run_one({1.0, 0.0}, 40.0);
    out.radial20 = run_one({1.0, 0.0}, 20.0);
    out.tangential40 = run_one({0.0, 1.0}, 40.0);
    out.tangential20 = run_one({0.0, 1.0}, 20.0);
    return out;
}

std::pair<bool, std::string> metric_identities() {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const int n = 37;
    NodalField e(n), neg(n), rot(n);
    for (int i = 0; i < 2 * n; ++i) e.values[i] = unit(rng);
    neg.values = -e.values;
    rot.values.head(n) = -e.values.tail(n);
    rot.values.tail(n) = e.values.head(n);

    const double d1 = std::abs(magnitude_ratio(e, e).value - 1.0);
    const double d2 = std::abs(cosine_similarity(e, e).value - 1.0);
    const double d3 = std::abs(cosine_similarity(neg, e).value + 1.0);
    const double d4 = std::abs(cosine_similarity(rot, e).value);
    const double worst = std::max({d1, d2, d3, d4});
    return {worst <= 1e-12,
            fmt("MR(e,e), CS(e,e), CS(e,-e), CS(e,rot90 e) off by at most %.1e",
                worst)};
}

std::pair<bool, std::string> operator_invariants() {
    TriMesh mesh = build_disk_mesh(1.0, 1.0 / 8);
    mesh.conductivity = 1.7;
    Eigen::SparseMatrix<double> A = assemble_stiffness(mesh);
    const double row_sums =
        (A * Eigen::VectorXd::Ones(A.cols())).lpNorm<Eigen::Infinity>();

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unit(-0.6, 0.6);
    double load_sum = 0.0;
    for (int t = 0; t < 10; ++t) {
        DipoleSource src{{unit(rng), unit(rng)}, {unit(rng), 1.0}};
        Eigen::VectorXd bvec = dipole_rhs(mesh, src);
        load_sum = std::max(
            load_sum, std::abs(bvec.sum()) / std::max(1.0, bvec.lpNorm<1>()));
    }

    TriMesh coarse = build_disk_mesh(1.0, 1.0 / 15);
    ElectrodeLayout layout = place_electrodes(coarse, 32);
    const auto chords = enumerate_chords(layout, coarse);
    RayMatrix rl = assemble(coarse, chords, RayFlavor::Longitudinal);
    VectorLaplacian lap = build_laplacian(coarse);
    PenaltyWeights pw = build_weights(rl, lap);
    Eigen::VectorXd c(2 * coarse.num_nodes());
    c.head(coarse.num_nodes()).setConstant(0.8);
    c.tail(coarse.num_nodes()).setConstant(-1.9);
    const double d_const = (lap.D * c).lpNorm<Eigen::Infinity>();
    const double w_const = (pw.W * c).lpNorm<Eigen::Infinity>();

    double len_err = 0.0;
    for (const Chord& ch : chords) {
        const Point2 na = coarse.nodes[layout.node_ids[ch.endpoints.first]];
        const Point2 nb = coarse.nodes[layout.node_ids[ch.endpoints.second]];
        double total = 0.0;
        for (const Segment& s : clip_chord(coarse, ch)) total += norm(s.xb - s.xa);
        len_err = std::max(len_err, std::abs(total - norm(nb - na)));
    }

    const bool ok = row_sums <= 1e-12 && load_sum <= 1e-12 &&
                    d_const <= 1e-12 && w_const <= 1e-12 && len_err <= 1e-12;
    return {ok, fmt("stiffness rows %.1e, dipole load %.1e, D/W on constants "
                    "%.1e/%.1e, chord length %.1e",
                    row_sums, load_sum, d_const, w_const, len_err)};
}

}  // namespace

int main() {
    criterion("1. chord enumeration", chord_count);
    criterion("2. ray-matrix exactness", ray_exactness);
    criterion("3. endpoint identity", endpoint_identity);
    criterion("4. forward analytic oracle", forward_oracle);
    criterion("5. solver reference oracle", solver_oracle);

    // The reconstruction protocol feeds four pass/fail lines.
    const double t0 = now_seconds();
    try {
        ProtocolOut p = run_protocol();
        const double t_proto = now_seconds() - t0;
        const double edge = p.coarse_edge;

        const bool loc_ok = p.radial40.loc_error_avg <= edge &&
                            p.tangential40.loc_error_avg <= edge;
        report(loc_ok, "6a. localization at 40 dB",
               fmt("averaged-field argmax error radial %.3f / tangential %.3f "
                   "vs one coarse edge %.3f",
                   p.radial40.loc_error_avg, p.tangential40.loc_error_avg,
                   edge),
               t_proto);

        auto in_range = [](double v) { return v >= 0.01 && v < 1.0; };
        const bool mag_ok = in_range(p.radial40.max_mag_ratio_avg) &&
                            in_range(p.tangential40.max_mag_ratio_avg);
        report(mag_ok, "6b. magnitude attenuation",
               fmt("max magnitude ratio radial %.3f / tangential %.3f, want "
                   "[0.01, 1)",
                   p.radial40.max_mag_ratio_avg,
                   p.tangential40.max_mag_ratio_avg),
               0.0);

        auto degrades = [](const ProtocolRun& hi, const ProtocolRun& lo) {
            return lo.cs_mean <= hi.cs_mean &&
                   std::abs(lo.mr_mean - 1.0) >= std::abs(hi.mr_mean - 1.0);
        };
        const bool mono_ok = degrades(p.radial40, p.radial20) &&
                             degrades(p.tangential40, p.tangential20);
        report(mono_ok, "6c. noise monotonicity",
               fmt("radial MR %.3f->%.3f CS %.3f->%.3f; tangential MR "
                   "%.3f->%.3f CS %.3f->%.3f (40->20 dB)",
                   p.radial40.mr_mean, p.radial20.mr_mean, p.radial40.cs_mean,
                   p.radial20.cs_mean, p.tangential40.mr_mean,
                   p.tangential20.mr_mean, p.tangential40.cs_mean,
                   p.tangential20.cs_mean),
               0.0);

        const double worst_frac = std::max(p.radial40.worst_sparse_frac,
                                           p.tangential40.worst_sparse_frac);
        report(worst_frac <= 0.10, "6d. transverse sparsity",
               fmt("worst fraction above 5%% of profile max is %.1f%%, want "
                   "<= 10%%",
                   100.0 * worst_frac),
               0.0);
    } catch (const std::exception& err) {
        report(false, "6. reconstruction protocol",
               std::string("exception: ") + err.what(), now_seconds() - t0);
        g_failures += 3;  // counts for the four protocol lines
    }

    criterion("7. metric identities", metric_identities);
    criterion("8. operator invariants", operator_invariants);

    std::printf("%s: %d failure%s\n", g_failures ? "GATE FAILED" : "GATE OK",
                g_failures, g_failures == 1 ? "" : "s");
    return g_failures ? 1 : 0;
}
