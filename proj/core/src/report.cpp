#include "mfilt/report.hpp"

#include "mfilt/conditional.hpp"
#include "mfilt/principal_sets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace mfilt {

using nlohmann::json;

bool VerificationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.status != "fail"; });
}

std::string VerificationReport::to_json() const {
    json j;
    j["instance"] = instance;
    j["seed"] = seed;
    j["p"] = p;
    j["q"] = q;
    j["C2"] = C2;
    j["C2_q"] = C2_q;
    j["C2_pprime"] = C2_pprime;
    j["C1_lb"] = C1_lb;
    if (ratio)
        j["ratio"] = *ratio;
    else
        j["ratio"] = "undefined";
    j["witness"] = json{{"level", witness.level}, {"atoms", witness.atoms}};
    json checks_json = json::array();
    for (const auto& c : checks)
        checks_json.push_back(json{{"name", c.name}, {"status", c.status}, {"slack", c.slack}});
    j["checks"] = std::move(checks_json);
    j["all_pass"] = all_pass();
    return j.dump(2);
}

namespace {

double rel_err(double a, double b) {
    double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

LeafFunction random_positive(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    LeafFunction f(n);
    for (auto& v : f) v = std::pow(4.0, unif(rng) * 2.0 - 1.0);
    return f;
}

CheckResult check_martingale_algebra(const FilteredSpace& space, std::mt19937_64& rng) {
    CheckResult out{"martingale_properties", "pass", 0.0};
    const int L = static_cast<int>(space.n_levels());
    for (int rep = 0; rep < 4; ++rep) {
        LeafFunction f = random_positive(space.n_leaves(), rng);
        LeafFunction g = random_positive(space.n_leaves(), rng);
        for (int i = 0; i < L; ++i) {
            LeafFunction ef = cond_expect(space, f, i);
            LeafFunction eg = cond_expect(space, g, i);
            // pull-out with G-measurable multiplier
            LeafFunction fg(f.size());
            for (std::size_t leaf = 0; leaf < f.size(); ++leaf) fg[leaf] = f[leaf] * eg[leaf];
            LeafFunction efg = cond_expect(space, fg, i);
            for (std::size_t leaf = 0; leaf < f.size(); ++leaf)
                out.slack = std::max(out.slack, rel_err(efg[leaf], ef[leaf] * eg[leaf]));
            // self-adjointness
            double a = inner(space, ef, g);
            double b = inner(space, f, eg);
            double c = inner(space, ef, eg);
            out.slack = std::max({out.slack, rel_err(a, b), rel_err(b, c)});
            // tower rule
            for (int j = i; j < L; ++j) {
                LeafFunction through = cond_expect(space, cond_expect(space, f, j), i);
                LeafFunction direct = cond_expect(space, f, i);
                for (std::size_t leaf = 0; leaf < f.size(); ++leaf)
                    out.slack = std::max(out.slack, rel_err(through[leaf], direct[leaf]));
            }
        }
    }
    if (out.slack > 1e-12) out.status = "fail";
    return out;
}

CheckResult check_doob(const FilteredSpace& space, std::mt19937_64& rng) {
    CheckResult out{"doob", "pass", 0.0};
    for (int rep = 0; rep < 4; ++rep) {
        LeafFunction f = random_positive(space.n_leaves(), rng);
        LeafFunction fstar = doob_maximal(space, f);
        double mass = integral(space, f);
        std::vector<double> lambdas(fstar.begin(), fstar.end());
        lambdas.push_back(0.5 * mass / space.total_mass());
        for (double lambda : lambdas) {
            if (!(lambda > 0.0)) continue;
            double level_mass = 0.0;
            for (std::size_t leaf = 0; leaf < fstar.size(); ++leaf)
                if (fstar[leaf] > lambda) level_mass += space.leaf_weight(leaf);
            double lhs = lambda * level_mass;
            out.slack = std::max(out.slack, (lhs - mass) / std::max(mass, 1e-300));
        }
        for (double p : {1.5, 2.0, 3.0}) {
            double pprime = p / (p - 1.0);
            double lhs = lp_norm(space, fstar, p);
            double rhs = pprime * lp_norm(space, f, p);
            out.slack = std::max(out.slack, (lhs - rhs) / rhs);
        }
    }
    if (out.slack > 1e-12) out.status = "fail";
    return out;
}

CheckResult check_atom_reduction(const FilteredSpace& space, const CoefficientFamily& alpha,
                                 const ExponentPair& ep, const TestingResult& fast,
                                 bool force) {
    CheckResult out{"atom_reduction", "pass", 0.0};
    int max_atoms = 0;
    for (int i = 0; i < static_cast<int>(space.n_levels()); ++i)
        max_atoms = std::max(max_atoms, space.n_atoms(i));
    if (max_atoms > 20 || (max_atoms > 16 && !force)) {
        out.status = "skipped";
        return out;
    }
    TestingResult oracle = brute_force_testing(space, alpha, ep);
    out.slack = std::max({rel_err(fast.C2, oracle.C2), rel_err(fast.C2_q, oracle.C2_q),
                          rel_err(fast.C2_pprime, oracle.C2_pprime)});
    if (out.slack > 1e-12) out.status = "fail";
    return out;
}

CheckResult check_footnote(const FilteredSpace& space, const CoefficientFamily& alpha,
                           const ExponentPair& ep, const TestingResult& testing) {
    CheckResult out{"footnote_identity", "pass", 0.0};
    if (testing.witness.level < 0) {  // alpha identically zero, nothing to check
        MaxIdentityCheck chk =
            footnote_max_identity_check(space, alpha, ep, 0, {0});
        out.slack = rel_err(chk.lhs, chk.rhs);
        if (!chk.pass) out.status = "fail";
        return out;
    }
    MaxIdentityCheck chk = footnote_max_identity_check(space, alpha, ep, testing.witness.level,
                                                       testing.witness.atoms);
    out.slack = rel_err(chk.lhs, chk.rhs);
    if (!chk.pass) out.status = "fail";
    return out;
}

CheckResult check_principal(const FilteredSpace& space, std::mt19937_64& rng, int i0) {
    CheckResult out{"principal_iv_v", "pass", 0.0};
    for (int rep = 0; rep < 4; ++rep) {
        LeafFunction f = random_positive(space.n_leaves(), rng);
        PrincipalTree tree = build_principal_tree(space, f, i0);
        PrincipalReport rep_out = verify_properties(space, f, tree);
        out.slack = std::max({out.slack, rep_out.iv_worst, rep_out.v_worst});
        if (!rep_out.iv_ok || !rep_out.v_ok || !rep_out.weak11_ok) out.status = "fail";
    }
    return out;
}

CheckResult check_carleson(const FilteredSpace& space, std::mt19937_64& rng, int i0, double p) {
    CheckResult out{"carleson", "pass", 0.0};
    for (int rep = 0; rep < 4; ++rep) {
        LeafFunction f = random_positive(space.n_leaves(), rng);
        PrincipalTree tree = build_principal_tree(space, f, i0);
        double lhs = carleson_sum(space, tree, p);
        double rhs = 2.0 * std::pow(lp_norm(space, doob_maximal(space, f), p), p);
        out.slack = std::max(out.slack, lhs / rhs);
        if (lhs > rhs) out.status = "fail";
    }
    return out;
}

CheckResult check_decomposition(const FilteredSpace& space, const CoefficientFamily& alpha,
                                const ExponentPair& ep, std::mt19937_64& rng, int i0) {
    CheckResult out{"decomposition_identity", "pass", 0.0};
    for (int rep = 0; rep < 4; ++rep) {
        LeafFunction f = random_positive(space.n_leaves(), rng);
        LeafFunction g = random_positive(space.n_leaves(), rng);
        Decomposition d = decompose_bilinear(space, alpha, f, g, i0, ep);
        out.slack = std::max({out.slack, rel_err(d.lhs, d.rhs),
                              rel_err(d.split_F + d.split_G, d.lhs)});
    }
    if (out.slack > 1e-10) out.status = "fail";
    return out;
}

CheckResult check_easy_direction(double C1_lb, const TestingResult& testing) {
    CheckResult out{"easy_direction", "pass", 0.0};
    double target = std::max(testing.C2_q, testing.C2_pprime);
    double margin = 1e-9 * testing.C2;
    out.slack = (target == 0.0) ? 0.0 : (target - C1_lb) / target;
    if (C1_lb < target - margin) out.status = "fail";
    return out;
}

}  // namespace

VerificationReport run_verification(const FilteredSpace& space, const CoefficientFamily& alpha,
                                    const ExponentPair& ep, const VerifyConfig& config) {
    VerificationReport report;
    report.instance = std::to_string(space.n_levels()) + "x" + std::to_string(space.n_leaves());
    report.seed = config.seed;
    report.p = ep.p;
    report.q = ep.q;

    TestingResult testing = testing_constant(space, alpha, ep);
    report.C2 = testing.C2;
    report.C2_q = testing.C2_q;
    report.C2_pprime = testing.C2_pprime;
    report.witness = testing.witness;

    // Primal search plus the adjoint search with exponents (q', p'); by
    // self-adjointness both bound the same operator norm from below.
    NormEstimate primal = norm_lower_bound(space, alpha, ep.p, ep.q, config.restarts,
                                           config.iters, config.tol, config.seed);
    NormEstimate adjoint = norm_lower_bound(space, alpha, ep.qprime(), ep.pprime(),
                                            config.restarts, config.iters, config.tol,
                                            config.seed + 0x9e3779b9u);
    report.C1_lb = std::max(primal.value, adjoint.value);
    if (report.C2 > 0.0) report.ratio = report.C1_lb / report.C2;

    std::mt19937_64 rng(config.seed ^ 0xda3e39cb94b95bdbULL);
    report.checks.push_back(check_martingale_algebra(space, rng));
    report.checks.push_back(check_doob(space, rng));
    report.checks.push_back(check_atom_reduction(space, alpha, ep, testing, config.brute_force));
    report.checks.push_back(check_footnote(space, alpha, ep, testing));
    report.checks.push_back(check_principal(space, rng, config.i0));
    report.checks.push_back(check_carleson(space, rng, config.i0, ep.p));
    report.checks.push_back(check_decomposition(space, alpha, ep, rng, config.i0));
    report.checks.push_back(check_easy_direction(report.C1_lb, testing));
    return report;
}

unsigned sweep_thread_cap() {
    unsigned cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MFILT_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) cap = static_cast<unsigned>(std::min<long>(v, 256));
    }
    return cap;
}

std::string run_sweep_csv(const SweepConfig& config, SweepSummary* summary) {
    std::vector<std::string> rows(static_cast<std::size_t>(std::max(config.n_instances, 0)));
    std::vector<double> ratios(rows.size(), -1.0);
    std::vector<char> passes(rows.size(), 1);

    auto worker = [&](int index) {
        const auto& shape = config.shapes[static_cast<std::size_t>(index) % config.shapes.size()];
        auto [p, q] = config.exponents[(static_cast<std::size_t>(index) / config.shapes.size()) %
                                       config.exponents.size()];
        std::uint64_t inst_seed = config.seed + 1000003ull * static_cast<std::uint64_t>(index);
        FilteredSpace space = generate_random_tree(shape.n_levels, shape.n_leaves,
                                                   WeightMode::LogUniform, inst_seed);
        CoefficientFamily alpha = random_coefficients(space, inst_seed + 1);

        VerifyConfig vc;
        vc.seed = inst_seed + 2;
        vc.restarts = config.restarts;
        vc.iters = config.iters;
        VerificationReport rep = run_verification(space, alpha, ExponentPair(p, q), vc);

        std::ostringstream row;
        row << index << ',' << inst_seed << ',' << shape.n_levels << ',' << shape.n_leaves << ','
            << format_double(p) << ',' << format_double(q) << ',' << format_double(rep.C2) << ','
            << format_double(rep.C2_q) << ',' << format_double(rep.C2_pprime) << ','
            << format_double(rep.C1_lb) << ','
            << (rep.ratio ? format_double(*rep.ratio) : std::string("undefined")) << ','
            << (rep.all_pass() ? "true" : "false");
        rows[static_cast<std::size_t>(index)] = row.str();
        if (rep.ratio) ratios[static_cast<std::size_t>(index)] = *rep.ratio;
        passes[static_cast<std::size_t>(index)] = rep.all_pass() ? 1 : 0;
    };

    const unsigned n_threads =
        std::min<unsigned>(sweep_thread_cap(), std::max<std::size_t>(rows.size(), 1));
    if (n_threads <= 1 || rows.size() <= 1) {
        for (int i = 0; i < static_cast<int>(rows.size()); ++i) worker(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t)
            pool.emplace_back([&, t]() {
                for (std::size_t i = t; i < rows.size(); i += n_threads)
                    worker(static_cast<int>(i));
            });
        for (auto& th : pool) th.join();
    }

    std::vector<double> defined;
    for (double r : ratios)
        if (r >= 0.0) defined.push_back(r);
    std::sort(defined.begin(), defined.end());

    SweepSummary s;
    s.n_defined = static_cast<int>(defined.size());
    if (!defined.empty()) {
        s.min_ratio = defined.front();
        s.max_ratio = defined.back();
        s.median_ratio = defined[defined.size() / 2];
    }
    s.all_pass = std::all_of(passes.begin(), passes.end(), [](char c) { return c != 0; });
    if (summary) *summary = s;

    std::ostringstream out;
    out << "index,seed,n_levels,n_leaves,p,q,C2,C2_q,C2_pprime,C1_lb,ratio,all_pass\n";
    for (const auto& row : rows) out << row << '\n';
    if (rows.empty()) return out.str();
    out << "summary,min_ratio=" << format_double(s.min_ratio)
        << ",median_ratio=" << format_double(s.median_ratio)
        << ",max_ratio=" << format_double(s.max_ratio) << ",n_defined=" << s.n_defined
        << ",all_pass=" << (s.all_pass ? "true" : "false") << '\n';
    return out.str();
}

}  // namespace mfilt
