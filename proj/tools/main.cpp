#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfilt/conditional.hpp"
#include "mfilt/filtered_space.hpp"
#include "mfilt/norm_estimator.hpp"
#include "mfilt/positive_operator.hpp"
#include "mfilt/principal_sets.hpp"
#include "mfilt/report.hpp"
#include "mfilt/sawyer_testing.hpp"

using nlohmann::json;

namespace {

constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

json leaf_function_json(const mfilt::LeafFunction& f) {
    json arr = json::array();
    for (double v : f) arr.push_back(mfilt::format_double(v));
    return arr;
}

mfilt::WeightMode parse_weight_mode(const std::string& s) {
    if (s == "unit") return mfilt::WeightMode::Unit;
    if (s == "log-uniform") return mfilt::WeightMode::LogUniform;
    throw CLI::ValidationError("--weights must be 'unit' or 'log-uniform'");
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Positive operators on finite filtered measure spaces: testing "
                 "constants, principal sets and operator-norm estimates"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a space file");
    std::string gen_kind = "dyadic", gen_weights = "unit", gen_out;
    int gen_depth = 2, gen_branching = 2, gen_levels = 3, gen_leaves = 8;
    std::uint64_t gen_seed = 1;
    gen->add_option("--kind", gen_kind, "dyadic or random")->check(CLI::IsMember({"dyadic", "random"}));
    gen->add_option("--depth", gen_depth);
    gen->add_option("--branching", gen_branching);
    gen->add_option("--levels", gen_levels);
    gen->add_option("--leaves", gen_leaves);
    gen->add_option("--weights", gen_weights, "unit or log-uniform");
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", gen_out, "output path (default stdout)");

    // check
    auto* check = app.add_subcommand("check", "Validate a space file");
    std::string check_space;
    check->add_option("--space", check_space)->required();

    // expect
    auto* expect = app.add_subcommand("expect", "Conditional expectation of f at a level");
    std::string expect_space, expect_f;
    int expect_level = 0;
    expect->add_option("--space", expect_space)->required();
    expect->add_option("--f", expect_f)->required();
    expect->add_option("--i", expect_level)->required();

    // testing
    auto* testing = app.add_subcommand("testing", "Sawyer testing constants");
    std::string testing_space, testing_alpha;
    double testing_p = 2.0, testing_q = 2.0;
    bool testing_brute = false;
    testing->add_option("--space", testing_space)->required();
    testing->add_option("--alpha", testing_alpha)->required();
    testing->add_option("--p", testing_p)->required();
    testing->add_option("--q", testing_q)->required();
    testing->add_flag("--brute-force", testing_brute, "also run the exhaustive oracle");

    // norm
    auto* norm = app.add_subcommand("norm", "Operator-norm lower bound via power iteration");
    std::string norm_space, norm_alpha;
    double norm_p = 2.0, norm_q = 2.0, norm_tol = 1e-12;
    int norm_restarts = 8, norm_iters = 500;
    std::uint64_t norm_seed = 1;
    norm->add_option("--space", norm_space)->required();
    norm->add_option("--alpha", norm_alpha)->required();
    norm->add_option("--p", norm_p)->required();
    norm->add_option("--q", norm_q)->required();
    norm->add_option("--restarts", norm_restarts);
    norm->add_option("--iters", norm_iters);
    norm->add_option("--tol", norm_tol);
    norm->add_option("--seed", norm_seed);

    // principal
    auto* principal = app.add_subcommand("principal", "Principal-set forest of f");
    std::string pr_space, pr_f;
    int pr_i0 = 0;
    double pr_p = 2.0;
    principal->add_option("--space", pr_space)->required();
    principal->add_option("--f", pr_f)->required();
    principal->add_option("--i0", pr_i0);
    principal->add_option("--p", pr_p, "exponent for the Carleson sum");

    // verify
    auto* verify = app.add_subcommand("verify", "Full verification pipeline");
    std::string ver_space, ver_alpha, ver_csv;
    double ver_p = 2.0, ver_q = 2.0, ver_tol = 1e-12;
    int ver_i0 = 0, ver_restarts = 8, ver_iters = 500;
    std::uint64_t ver_seed = 1;
    bool ver_brute = false;
    verify->add_option("--space", ver_space)->required();
    verify->add_option("--alpha", ver_alpha)->required();
    verify->add_option("--p", ver_p)->required();
    verify->add_option("--q", ver_q)->required();
    verify->add_option("--i0", ver_i0);
    verify->add_option("--seed", ver_seed);
    verify->add_option("--restarts", ver_restarts);
    verify->add_option("--iters", ver_iters);
    verify->add_option("--tol", ver_tol);
    verify->add_flag("--brute-force", ver_brute);
    verify->add_option("--csv", ver_csv, "append the report as one CSV row");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Random-instance sweep with ratio statistics");
    std::string sw_shapes = "3x8", sw_exponents = "2:2", sw_csv;
    int sw_instances = 0;
    std::uint64_t sw_seed = 1;
    sweep->add_option("--shapes", sw_shapes, "comma list of LEVELSxLEAVES, e.g. 3x8,4x12");
    sweep->add_option("--exponents", sw_exponents, "comma list of P:Q, e.g. 2:2,1.5:2");
    sweep->add_option("--instances", sw_instances)->required();
    sweep->add_option("--seed", sw_seed);
    sweep->add_option("--csv", sw_csv, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            mfilt::FilteredSpace space =
                gen_kind == "dyadic"
                    ? mfilt::generate_dyadic(gen_depth, gen_branching,
                                             parse_weight_mode(gen_weights), gen_seed)
                    : mfilt::generate_random_tree(gen_levels, gen_leaves,
                                                  parse_weight_mode(gen_weights), gen_seed);
            mfilt::save_space(space, gen_out.empty() ? "/dev/stdout" : gen_out);
            return 0;
        }

        if (check->parsed()) {
            try {
                mfilt::FilteredSpace space = mfilt::load_space(check_space);
                std::cout << json{{"valid", true}, {"n_leaves", space.n_leaves()},
                                  {"n_levels", space.n_levels()}}
                                 .dump(2)
                          << '\n';
                return 0;
            } catch (const std::exception& e) {
                std::cout << json{{"valid", false}, {"error", e.what()}}.dump(2) << '\n';
                return kExitUsage;
            }
        }

        if (expect->parsed()) {
            mfilt::FilteredSpace space = mfilt::load_space(expect_space);
            mfilt::LeafFunction f = mfilt::load_leaf_function(expect_f, space.n_leaves());
            mfilt::LeafFunction out = mfilt::cond_expect(space, f, expect_level);
            std::cout << json{{"level", expect_level}, {"values", leaf_function_json(out)}}.dump(2)
                      << '\n';
            return 0;
        }

        if (testing->parsed()) {
            mfilt::FilteredSpace space = mfilt::load_space(testing_space);
            mfilt::CoefficientFamily alpha = mfilt::load_coefficients(testing_alpha, space);
            mfilt::ExponentPair ep(testing_p, testing_q);
            mfilt::TestingResult res = mfilt::testing_constant(space, alpha, ep);
            json out{{"C2", res.C2},
                     {"C2_q", res.C2_q},
                     {"C2_pprime", res.C2_pprime},
                     {"witness", json{{"level", res.witness.level}, {"atoms", res.witness.atoms}}}};
            if (testing_brute) {
                mfilt::TestingResult oracle = mfilt::brute_force_testing(space, alpha, ep);
                double scale = std::max(res.C2, oracle.C2);
                out["oracle_C2"] = oracle.C2;
                out["fast_path_agrees"] =
                    std::abs(res.C2 - oracle.C2) <= 1e-12 * std::max(scale, 1.0);
            }
            std::cout << out.dump(2) << '\n';
            return 0;
        }

        if (norm->parsed()) {
            mfilt::FilteredSpace space = mfilt::load_space(norm_space);
            mfilt::CoefficientFamily alpha = mfilt::load_coefficients(norm_alpha, space);
            mfilt::NormEstimate est = mfilt::norm_lower_bound(space, alpha, norm_p, norm_q,
                                                              norm_restarts, norm_iters, norm_tol,
                                                              norm_seed);
            std::cout << json{{"C1_lb", est.value},
                              {"witness", leaf_function_json(est.witness)},
                              {"restarts", est.restarts},
                              {"converged", est.converged}}
                             .dump(2)
                      << '\n';
            return 0;
        }

        if (principal->parsed()) {
            mfilt::FilteredSpace space = mfilt::load_space(pr_space);
            mfilt::LeafFunction f = mfilt::load_leaf_function(pr_f, space.n_leaves());
            mfilt::PrincipalTree tree = mfilt::build_principal_tree(space, f, pr_i0);
            json out = json::parse(mfilt::tree_to_json(tree));
            out["n_sets"] = tree.size();
            out["carleson_sum"] = mfilt::carleson_sum(space, tree, pr_p);
            std::cout << out.dump(2) << '\n';
            return 0;
        }

        if (verify->parsed()) {
            mfilt::FilteredSpace space = mfilt::load_space(ver_space);
            mfilt::CoefficientFamily alpha = mfilt::load_coefficients(ver_alpha, space);
            mfilt::VerifyConfig vc;
            vc.i0 = ver_i0;
            vc.seed = ver_seed;
            vc.restarts = ver_restarts;
            vc.iters = ver_iters;
            vc.tol = ver_tol;
            vc.brute_force = ver_brute;
            mfilt::VerificationReport rep =
                mfilt::run_verification(space, alpha, mfilt::ExponentPair(ver_p, ver_q), vc);
            std::cout << rep.to_json() << '\n';
            if (!ver_csv.empty()) {
                std::ofstream csv(ver_csv, std::ios::app);
                if (!csv) throw std::runtime_error("cannot write " + ver_csv);
                csv << rep.instance << ',' << rep.seed << ',' << mfilt::format_double(rep.p) << ','
                    << mfilt::format_double(rep.q) << ',' << mfilt::format_double(rep.C2) << ','
                    << mfilt::format_double(rep.C1_lb) << ','
                    << (rep.ratio ? mfilt::format_double(*rep.ratio) : std::string("undefined"))
                    << ',' << (rep.all_pass() ? "true" : "false") << '\n';
            }
            return rep.all_pass() ? 0 : kExitCheckFailure;
        }

        if (sweep->parsed()) {
            mfilt::SweepConfig sc;
            sc.n_instances = sw_instances;
            sc.seed = sw_seed;
            for (const auto& token : CLI::detail::split(sw_shapes, ',')) {
                auto pos = token.find('x');
                if (pos == std::string::npos)
                    throw std::runtime_error("bad shape '" + token + "', expected LEVELSxLEAVES");
                sc.shapes.push_back({std::stoi(token.substr(0, pos)),
                                     std::stoi(token.substr(pos + 1))});
            }
            for (const auto& token : CLI::detail::split(sw_exponents, ',')) {
                auto pos = token.find(':');
                if (pos == std::string::npos)
                    throw std::runtime_error("bad exponent pair '" + token + "', expected P:Q");
                sc.exponents.emplace_back(std::stod(token.substr(0, pos)),
                                          std::stod(token.substr(pos + 1)));
            }
            mfilt::SweepSummary summary;
            std::string csv = mfilt::run_sweep_csv(sc, &summary);
            write_text(sw_csv, csv);
            return summary.all_pass ? 0 : kExitCheckFailure;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
