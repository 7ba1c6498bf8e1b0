// Command-line surface for the steering-certification library: closed-form
// bounds, figure-data CSV generation, verification suites, and sample-size
// planning. Exit codes: 0 success, 1 verification failure, 2 invalid input.
#include <CLI11.hpp>

#include <steercert/certify_analytic.hpp>
#include <steercert/certify_sdp.hpp>
#include <steercert/relations.hpp>
#include <steercert/sampling.hpp>
#include <steercert/sos.hpp>
#include <steercert/three_setting.hpp>

#include <fstream>
#include <iostream>
#include <random>

using namespace steercert;

namespace {

Family parse_family(const std::string& name) {
    for (Family f : {Family::TiltedAnalog, Family::TwoSetTrusted, Family::TwoSetUntrusted,
                     Family::ThreeSetTrusted, Family::ThreeSetUntrusted})
        if (name == family_name(f)) return f;
    throw std::invalid_argument("unknown family: " + name +
                                " (expected tilted-analog, two-trusted, two-untrusted, "
                                "three-trusted or three-untrusted)");
}

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(output_path);
    if (!f) throw std::invalid_argument("cannot open output file: " + output_path);
    f << text;
}

struct RunConfig {
    std::string family = "tilted-analog";
    double alpha = 0.0;
    double beta = 1.0;
    std::string figure = "fig2";
    double grid_min = -1, grid_max = -1;
    int grid_points = 0;
    double tol = 1e-6;
    unsigned seed = 777;
    int jobs = 0;  // 0: number of processors
    double eps = 0.01, delta = 0.01;
    std::string output_path;
    bool inject_sos_error = false;
};

int cmd_bounds(const RunConfig& cfg) {
    SteeringInequality ineq{parse_family(cfg.family), cfg.alpha, cfg.beta};
    ineq.validate();
    std::ostringstream out;
    out.precision(12);
    out << "family: " << family_name(ineq.family) << "\n"
        << "alpha: " << ineq.alpha << "\n"
        << "beta: " << ineq.beta << "\n"
        << "lhs_bound: " << lhs_bound_closed_form(ineq) << "\n"
        << "quantum_bound: " << quantum_bound(ineq) << "\n"
        << "target_theta: " << target_theta(ineq) << "\n";
    emit(out.str(), cfg.output_path);
    return 0;
}

int cmd_curve(const RunConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    if (cfg.figure == "fig2") {
        SteeringInequality ineq{Family::TiltedAnalog, cfg.alpha, 1.0};
        ineq.validate();
        const double lo = cfg.grid_min >= 0 ? cfg.grid_min : lhs_bound_closed_form(ineq);
        const double hi = cfg.grid_max >= 0 ? cfg.grid_max : quantum_bound(ineq);
        const int n = cfg.grid_points > 0 ? cfg.grid_points : 100;
        std::vector<double> grid;
        for (int i = 0; i < n; ++i) grid.push_back(lo + (hi - lo) * i / (n - 1));
        out << "observed,F_DD,F_1SDI,F_DI\n";
        for (const auto& r : comparison_table(cfg.alpha, grid))
            out << r.observed << "," << r.f_dd << "," << r.f_1sdi << "," << r.f_di << "\n";
        emit(out.str(), cfg.output_path);
        return 0;
    }
    if (cfg.figure == "fig3") {
        // fidelity bounds indexed by the guessing probability, alpha = 0
        const double s2 = 1 / (4 - 2 * std::sqrt(2.0)), t2 = 1 - 2 * s2;
        const double s3 = 3 / (12 - 4 * std::sqrt(2.0)), t3 = 1 - 3 * s3;
        const int n = cfg.grid_points > 0 ? cfg.grid_points : 200;
        out << "p,F_two_setting,F_three_setting\n";
        for (int i = 0; i < n; ++i) {
            const double p = 0.5 + 0.5 * i / (n - 1);
            const double S2 = (p - 0.5) * 2 * 2, S3 = (p - 0.5) * 2 * 3;
            out << p << "," << std::clamp(s2 * S2 + t2, 0.0, 1.0) << ","
                << std::clamp(s3 * S3 + t3, 0.0, 1.0) << "\n";
        }
        emit(out.str(), cfg.output_path);
        return 0;
    }
    if (cfg.figure == "fig5") {
        SteeringInequality ineq{parse_family(cfg.family), cfg.alpha, cfg.beta};
        if (ineq.family == Family::TiltedAnalog)
            ineq = {Family::ThreeSetTrusted, cfg.alpha, cfg.beta};
        ineq.validate();
        const double lo = cfg.grid_min >= 0 ? cfg.grid_min : lhs_bound_closed_form(ineq);
        const double hi = cfg.grid_max >= 0 ? cfg.grid_max : quantum_bound(ineq);
        const int n = cfg.grid_points > 0 ? cfg.grid_points : 30;
        std::vector<double> grid;
        for (int i = 0; i < n; ++i) grid.push_back(lo + (hi - lo) * i / (n - 1));
        auto rows = sweep_curve(ineq, target_theta(ineq), grid, cfg.tol, cfg.jobs);
        int solved = 0;
        for (const auto& r : rows)
            if (r.status == "optimal") ++solved;
        emit(sweep_csv(rows), cfg.output_path);
        return 10 * solved >= 9 * static_cast<int>(rows.size()) ? 0 : 1;
    }
    throw std::invalid_argument("unknown figure: " + cfg.figure +
                                " (expected fig2, fig3 or fig5)");
}

int cmd_verify(const RunConfig& cfg) {
    std::ostringstream rep;
    rep.precision(6);
    bool ok = true;
    auto check = [&](const std::string& item, bool pass, double value) {
        rep << (pass ? "OK   " : "FAIL ") << item << "  (" << value << ")\n";
        ok = ok && pass;
    };

    // sum-of-squares identities over randomized settings
    for (SosId id : all_sos_ids) {
        double a = 0.7, b = 1.9;
        switch (sos_family(id)) {
            case Family::TiltedAnalog: b = 1.0; break;
            case Family::TwoSetUntrusted: b = std::sqrt(1 + a * a) + 0.2; break;
            case Family::ThreeSetUntrusted: b = std::sqrt(4 + a * a) + 0.2; break;
            default: break;
        }
        double r;
        if (cfg.inject_sos_error && id == SosId::MainSos1) {
            // negative control: corrupt one coefficient and re-evaluate
            auto x = sos_coefficients(id, a, b);
            std::mt19937_64 rng(cfg.seed);
            auto bob = detail::random_bob_settings(2, rng);
            auto sys = detail::sos_system(id, a, b, bob);
            Mat R = sys.shift;
            x[0] += 0.01;
            for (size_t t = 0; t < sys.terms.size(); ++t)
                R -= x[t] * (dag(sys.terms[t]) * sys.terms[t]);
            r = R.norm();
        } else {
            r = sos_max_residual(id, a, b, 50, cfg.seed);
        }
        check(std::string("sos identity ") + sos_id_name(id), r < 1e-10, r);
    }

    // self-testing relations and SWAP extraction at exact maximal violation
    for (const auto& ineq : std::vector<SteeringInequality>{
             {Family::TiltedAnalog, 0.5, 1.0},
             {Family::TwoSetTrusted, 0.8, 1.7},
             {Family::TwoSetUntrusted, 0.5, 1.6},
             {Family::ThreeSetTrusted, 1.0, 2.0},
             {Family::ThreeSetUntrusted, 0.5, 2.4}}) {
        auto bob = ideal_bob_settings(ineq);
        const Vec psi = target_state(target_theta(ineq));
        double worst = 0;
        for (const auto& r : relation_residuals(ineq, psi, bob)) worst = std::max(worst, r.norm);
        check(std::string("relations ") + family_name(ineq.family), worst < 1e-10, worst);
        const double defect = std::abs(1 - swap_isometry_output(psi, ineq, bob).target_fidelity);
        check(std::string("swap extraction ") + family_name(ineq.family), defect < 1e-10, defect);
    }

    // extraction-channel PSD margins
    {
        auto c = certify_tilted_analog(0.5, 128);
        check("tilted-analog G margin (alpha=0.5)", c.worst_margin >= -1e-9, c.worst_margin);
        auto c2 = certify_chsh_steering(128);
        check("two-setting G margin", c2.worst_margin >= -1e-9, c2.worst_margin);
        auto c3 = certify_three_setting(16);
        check("three-setting G1 margin", c3.worst_margin_full >= -1e-9, c3.worst_margin_full);
        check("three-setting G2 margin", c3.worst_margin_g2 >= -1e-9, c3.worst_margin_g2);
    }

    // moment-matrix pattern soundness on random strategies
    {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> g;
        double worst = 0, worst_obj = 0;
        for (int nset : {3, 2}) {
            auto p = build_gamma_pattern(nset);
            for (int t = 0; t < 25; ++t) {
                Mat A(4, 4);
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j) A(i, j) = Complex(g(rng), g(rng));
                Mat rho = A * dag(A);
                rho /= rho.trace().real();
                std::vector<Mat> E;
                for (int k = 0; k < 3; ++k) {
                    std::array<double, 3> v{g(rng), g(rng), g(rng)};
                    const double nn = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
                    E.push_back((identity(2) +
                                 (v[0] * pauli_x() + v[1] * pauli_y() + v[2] * pauli_z()) / nn) /
                                2.0);
                }
                Mat G = assemble_gamma(rho, E, p);
                worst = std::min(worst, min_eig(G));
                const double f1 =
                    (objective_m(0.6, nset).cast<Complex>() * G).trace().real();
                const double f2 = detail::swap_fidelity_strategy(rho, E, 0.6);
                worst_obj = std::max(worst_obj, std::abs(f1 - f2));
            }
        }
        check("moment-matrix PSD over 50 strategies", worst >= -1e-10, worst);
        check("objective matches swap fidelity", worst_obj < 1e-10, worst_obj);
    }

    rep << "\n" << sos_report(0.7, 1.9, 20);
    emit(rep.str(), cfg.output_path);
    return ok ? 0 : 1;
}

int cmd_plan(const RunConfig& cfg) {
    SteeringInequality ineq{parse_family(cfg.family), cfg.alpha, cfg.beta};
    ineq.validate();
    double s;
    switch (ineq.family) {
        case Family::TiltedAnalog: {
            const double bQ = std::sqrt(8 + 2 * cfg.alpha * cfg.alpha);
            const double th = target_theta(ineq);
            s = std::sin(th) * std::sin(th) / (bQ - 2 - cfg.alpha);
            break;
        }
        case Family::TwoSetTrusted: s = 1 / (4 - 2 * std::sqrt(2.0)); break;
        case Family::ThreeSetTrusted: s = 3 / (12 - 4 * std::sqrt(2.0)); break;
        default:
            throw std::invalid_argument(
                "plan: no testing game is known for untrusted-marginal families");
    }
    auto plan = sample_count(ineq, cfg.eps, cfg.delta, s);
    std::ostringstream out;
    out.precision(12);
    out << "family: " << family_name(ineq.family) << "\n"
        << "regime: " << plan_regime_name(plan.regime)
        << (plan.note.empty() ? "" : " (" + plan.note + ")") << "\n"
        << "epsilon: " << plan.epsilon << "\n"
        << "delta: " << plan.delta << "\n"
        << "certificate_slope: " << s << "\n"
        << "c: " << plan.c << "\n"
        << "n_required: " << plan.n_required << "\n";
    emit(out.str(), cfg.output_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Certify closeness of an unknown two-qubit state to a target partially "
        "entangled state from steering-inequality violations"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Optional key=value config file; flags take precedence");

    RunConfig cfg;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--family", cfg.family,
                        "Inequality family: tilted-analog, two-trusted, two-untrusted, "
                        "three-trusted, three-untrusted")
            ->capture_default_str();
        sub->add_option("--alpha", cfg.alpha, "Tilt parameter alpha >= 0")
            ->capture_default_str();
        sub->add_option("--beta", cfg.beta, "Weight parameter beta")->capture_default_str();
        sub->add_option("--output", cfg.output_path, "Write output to this file (default stdout)");
        sub->add_option("--seed", cfg.seed, "RNG seed for randomized checks")
            ->capture_default_str();
    };

    auto* bounds = app.add_subcommand("bounds", "Closed-form LHS and quantum bounds");
    add_common(bounds);

    auto* curve = app.add_subcommand("curve", "Figure-data CSV (fig2, fig3, fig5)");
    add_common(curve);
    curve->add_option("--figure", cfg.figure, "Which curve set: fig2, fig3 or fig5")
        ->capture_default_str();
    curve->add_option("--grid-min", cfg.grid_min, "Grid start (default: LHS bound)");
    curve->add_option("--grid-max", cfg.grid_max, "Grid end (default: quantum bound)");
    curve->add_option("--grid-points", cfg.grid_points,
                      "Grid size (default: 100 fig2, 200 fig3, 30 fig5)");
    curve->add_option("--tol", cfg.tol, "SDP solver tolerance (fig5)")->capture_default_str();
    curve->add_option("--jobs", cfg.jobs, "Worker pool size (default: number of processors)");

    auto* verify = app.add_subcommand("verify", "Run the verification suites");
    add_common(verify);
    verify->add_flag("--inject-sos-error", cfg.inject_sos_error,
                     "Negative control: corrupt one SOS coefficient to force a failure");

    auto* plan = app.add_subcommand("plan", "Sample-size planning");
    add_common(plan);
    plan->add_option("--eps", cfg.eps, "Infidelity target in (0, 1)")->capture_default_str();
    plan->add_option("--delta", cfg.delta, "Significance level in (0, 1)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (bounds->parsed()) return cmd_bounds(cfg);
        if (curve->parsed()) return cmd_curve(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (plan->parsed()) return cmd_plan(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
