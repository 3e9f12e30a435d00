// Command-line front end. Everything goes through the C interface; JSON
// reports are written to stdout and diagnostics to stderr.
//
// Exit codes: 0 success, 1 a verify run that did not pass, 2 a library error,
// CLI11's own codes for malformed command lines.

#include "pirep/pirep.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kLibraryError = 2;

struct CliFailure {
    int code;
};

void check(pirep_status status)
{
    if (status == PIREP_OK)
        return;
    std::cerr << "pirep: " << pirep_status_string(status) << ": " << pirep_last_error() << '\n';
    throw CliFailure{kLibraryError};
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "pirep: cannot read " << path << '\n';
        throw CliFailure{kLibraryError};
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct RepDeleter {
    void operator()(pirep_rep* r) const { pirep_rep_free(r); }
};
using RepHandle = std::unique_ptr<pirep_rep, RepDeleter>;

RepHandle load_rep(const std::string& path, const pirep_options& options)
{
    pirep_rep* rep = nullptr;
    check(pirep_rep_from_json(read_file(path).c_str(), &options, &rep));
    return RepHandle(rep);
}

// Prints and frees a report returned by the library.
void print(char* json)
{
    std::fputs(json, stdout);
    std::fputc('\n', stdout);
    pirep_string_free(json);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Partial isometric covariant representations: classification, products, powers, "
                 "shifts, Wold decompositions and randomized theorem checks"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(pirep_version()));

    pirep_options options;
    pirep_options_init(&options);
    app.add_option("--tol-rank", options.rank_rel, "Relative singular value cutoff for ranks")->capture_default_str();
    app.add_option("--tol-eq", options.eq_rel, "Relative tolerance for operator equalities")->capture_default_str();
    app.add_option("--tol-incl", options.incl_abs, "Absolute tolerance for subspace inclusions")
        ->capture_default_str();
    app.add_option("--tensor-cap", options.tensor_cap, "Largest tensor space dimension before a resource error")
        ->capture_default_str();
    app.add_option("--jobs", options.jobs, "Worker threads for verify (0: all hardware threads)")
        ->capture_default_str();

    std::string rep_path;
    std::vector<std::string> rep_paths;
    bool all_conditions = false;
    int n_max = 4;
    int k = 2;
    long long shift_n = 1;
    std::vector<long long> zero_set;
    long long trunc = -1;
    int power = 3;
    std::string weights_path;
    bool no_rep = false;
    std::string theorem;
    int trials = 100;
    uint64_t seed = 42;
    bool falsify = false;
    std::string fixture_kind;
    long long fixture_dim = 3;

    auto* classify = app.add_subcommand("classify", "Classify a representation (all six partial-isometry conditions)");
    classify->add_option("--rep", rep_path, "Representation JSON file")->required();

    auto* product = app.add_subcommand("product", "Condition reports for a product of representations");
    product->add_option("--reps", rep_paths, "Factor JSON files, first factor first")->required()->expected(2, -1);
    product->add_flag("--all-conditions", all_conditions, "Add the four chain conditions for every stage");

    auto* powers = app.add_subcommand("powers", "Power partial isometry, regularity and bi-regularity");
    powers->add_option("--rep", rep_path, "Representation JSON file")->required();
    powers->add_option("--nmax", n_max, "Largest tensor power checked")->capture_default_str();

    auto* root = app.add_subcommand("root", "Root criterion for a rep whose k-th power is partial isometric");
    root->add_option("--rep", rep_path, "Representation JSON file")->required();
    root->add_option("--k", k, "Power whose partial isometry is assumed")->capture_default_str();

    auto* wold = app.add_subcommand("wold", "Wold-type decomposition");
    wold->add_option("--rep", rep_path, "Representation JSON file")->required();

    auto* shift = app.add_subcommand("shift", "Truncated weighted shift of E = C^n");
    shift->add_option("--n", shift_n, "Module dimension")->required();
    shift->add_option("--B", zero_set, "Indices m with alpha_m = 0, comma separated")->delimiter(',');
    shift->add_option("--M", trunc, "Truncation: H = span{e_0..e_M} (default n + n^2 + n^3)");
    shift->add_option("--power", power, "Power k for kernels and the chain inclusion")->capture_default_str();
    shift->add_option("--weights", weights_path, "JSON file with a list of {i, m, w} weight overrides");
    shift->add_flag("--no-rep", no_rep, "Leave the representation out of the output");

    auto* verify = app.add_subcommand("verify", "Randomized check of one statement");
    verify->add_option("--theorem", theorem, "Statement name (see `pirep theorems`)")->required();
    verify->add_option("--trials", trials, "Number of trials")->capture_default_str();
    verify->add_option("--seed", seed, "Master seed")->capture_default_str();
    verify->add_flag("--falsify", falsify, "Stop at the first counterexample; succeed only if one is found");

    auto* theorems = app.add_subcommand("theorems", "List the statements known to verify");

    auto* fixture = app.add_subcommand("fixture", "Print a named fixture representation");
    fixture->add_option("--kind", fixture_kind,
                        "isometric, unitary, coisometric, truncated_shift, perturbed_pi(eps) or direct_sum(...)")
        ->required();
    fixture->add_option("--dim", fixture_dim, "Hilbert space dimension parameter")->capture_default_str();
    fixture->add_option("--seed", seed, "Seed for the random parts")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        char* out = nullptr;
        if (*classify) {
            const RepHandle rep = load_rep(rep_path, options);
            check(pirep_classify_json(rep.get(), &out));
        } else if (*product) {
            std::vector<RepHandle> handles;
            std::vector<const pirep_rep*> raw;
            for (const std::string& path : rep_paths) {
                handles.push_back(load_rep(path, options));
                raw.push_back(handles.back().get());
            }
            check(pirep_product_json(raw.data(), raw.size(), all_conditions ? 1 : 0, &out));
        } else if (*powers) {
            const RepHandle rep = load_rep(rep_path, options);
            check(pirep_powers_json(rep.get(), n_max, &out));
        } else if (*root) {
            const RepHandle rep = load_rep(rep_path, options);
            check(pirep_root_json(rep.get(), k, &out));
        } else if (*wold) {
            const RepHandle rep = load_rep(rep_path, options);
            check(pirep_wold_json(rep.get(), &out));
        } else if (*shift) {
            std::ostringstream spec;
            spec << "{\"n\":" << shift_n;
            if (trunc >= 0)
                spec << ",\"M\":" << trunc;
            spec << ",\"B\":[";
            for (size_t i = 0; i < zero_set.size(); ++i)
                spec << (i ? "," : "") << zero_set[i];
            spec << "]";
            if (!weights_path.empty())
                spec << ",\"weights\":" << read_file(weights_path);
            spec << "}";
            check(pirep_shift_json(spec.str().c_str(), power, no_rep ? 0 : 1, &options, &out));
        } else if (*verify) {
            int passed = 0;
            check(pirep_verify_json(theorem.c_str(), seed, trials, falsify ? 1 : 0, &options, &out, &passed));
            print(out);
            return passed ? 0 : 1;
        } else if (*theorems) {
            check(pirep_theorems(&out));
            std::fputs(out, stdout);
            pirep_string_free(out);
            return 0;
        } else if (*fixture) {
            pirep_rep* raw = nullptr;
            check(pirep_rep_fixture(fixture_kind.c_str(), fixture_dim, seed, &options, &raw));
            const RepHandle rep(raw);
            check(pirep_rep_to_json(rep.get(), &out));
        }
        print(out);
    } catch (const CliFailure& f) {
        return f.code;
    }
    return 0;
}
